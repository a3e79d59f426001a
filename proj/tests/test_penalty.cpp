#include <gtest/gtest.h>

#include <random>

#include "sparsecov/errors.hpp"
#include "sparsecov/penalty.hpp"

using namespace sparsecov;

TEST(Penalty, Values) {
  EXPECT_DOUBLE_EQ(Penalty::l1(1.0).value(0.5), 0.5);
  EXPECT_DOUBLE_EQ(Penalty::l1(1.0).value(-0.5), 0.5);
  EXPECT_DOUBLE_EQ(Penalty::hard(1.0).value(0.0), 0.0);
  EXPECT_DOUBLE_EQ(Penalty::hard(1.0).value(1.0), 1.0);
  EXPECT_DOUBLE_EQ(Penalty::hard(1.0).value(7.0), 1.0);
  EXPECT_NEAR(Penalty::scad(1.0).value(3.7), 2.35, 1e-12);
  EXPECT_NEAR(Penalty::scad(1.0).value(10.0), 2.35, 1e-12);
  EXPECT_NEAR(Penalty::scad(1.0).value(0.7), 0.7, 1e-15);
}

TEST(Penalty, Derivatives) {
  const Penalty scad = Penalty::scad(1.0, 3.7);
  EXPECT_DOUBLE_EQ(scad.derivative(0.5), 1.0);
  EXPECT_DOUBLE_EQ(scad.derivative(1.0), 1.0);
  EXPECT_DOUBLE_EQ(scad.derivative(5.0), 0.0);
  EXPECT_NEAR(scad.derivative(2.0), 1.7 / 2.7, 1e-15);
  EXPECT_DOUBLE_EQ(Penalty::l1(0.3).derivative(9.0), 0.3);
  EXPECT_DOUBLE_EQ(Penalty::hard(1.0).derivative(0.25), 1.5);
  EXPECT_DOUBLE_EQ(Penalty::hard(1.0).derivative(1.0), 0.0);
  EXPECT_DOUBLE_EQ(Penalty::hard(1.0).derivative(3.0), 0.0);
}

TEST(Penalty, Validation) {
  EXPECT_THROW(Penalty::l1(-0.1), InvalidInput);
  EXPECT_THROW(Penalty::scad(0.1, 2.0), InvalidInput);
  EXPECT_THROW(Penalty::hard(std::nan("")), InvalidInput);
  EXPECT_NO_THROW(Penalty::l1(0.0));
}

TEST(Penalty, Parse) {
  const Penalty a = parse_penalty("scad:0.2:3.7");
  EXPECT_EQ(a.family(), PenaltyFamily::SCAD);
  EXPECT_DOUBLE_EQ(a.lambda(), 0.2);
  EXPECT_DOUBLE_EQ(a.shape(), 3.7);
  EXPECT_DOUBLE_EQ(parse_penalty("scad:0.2").shape(), 3.7);
  EXPECT_EQ(parse_penalty("hard:1").family(), PenaltyFamily::Hard);
  EXPECT_EQ(parse_penalty("l1:0.1").family(), PenaltyFamily::L1);
  EXPECT_THROW(parse_penalty("mcp:0.1"), InvalidInput);
  EXPECT_THROW(parse_penalty("l1"), InvalidInput);
  EXPECT_THROW(parse_penalty("l1:abc"), InvalidInput);
  EXPECT_THROW(parse_penalty("l1:0.1:2"), InvalidInput);
  EXPECT_EQ(parse_penalty(to_string(a)).lambda(), a.lambda());
}

TEST(Penalty, SingularAtOrigin) {
  for (double lambda : {0.05, 0.3, 2.0}) {
    const double t = 1e-8;
    EXPECT_GE(Penalty::l1(lambda).value(t) / t, 0.99 * lambda);
    EXPECT_GE(Penalty::scad(lambda).value(t) / t, 0.99 * lambda);
    EXPECT_GE(Penalty::hard(lambda).value(t) / t, 0.99 * 2.0 * lambda);
    EXPECT_DOUBLE_EQ(Penalty::hard(lambda).slope_at_zero(), 2.0 * lambda);
  }
}

TEST(Penalty, ValueIsAntiderivative) {
  std::mt19937_64 rng(41);
  for (const Penalty& base : {Penalty::l1(1.0), Penalty::scad(1.0), Penalty::scad(1.0, 2.5), Penalty::hard(1.0)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const double lambda = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
      const Penalty pen = base.with_lambda(lambda);
      const double theta = std::uniform_real_distribution<double>(1e-6, 5.0 * lambda)(rng);
      const int steps = 10000;
      const double h = theta / steps;
      double integral = 0.5 * (pen.derivative(0.0) + pen.derivative(theta));
      for (int k = 1; k < steps; ++k) integral += pen.derivative(k * h);
      integral *= h;
      EXPECT_NEAR(integral, pen.value(theta), 1e-6 * std::max(pen.value(theta), 1e-300))
          << family_name(pen.family()) << " lambda=" << lambda << " theta=" << theta;
    }
  }
}

TEST(Penalty, ConcaveNondecreasingEven) {
  for (const Penalty& pen : {Penalty::l1(0.7), Penalty::scad(0.7), Penalty::hard(0.7)}) {
    double prev_d = pen.derivative(0.0);
    double prev_v = 0.0;
    EXPECT_EQ(pen.value(0.0), 0.0);
    for (int k = 1; k <= 2000; ++k) {
      const double t = k * 0.002;
      EXPECT_LE(pen.derivative(t), prev_d + 1e-15);
      EXPECT_GE(pen.value(t), prev_v);
      EXPECT_EQ(pen.value(t), pen.value(-t));
      prev_d = pen.derivative(t);
      prev_v = pen.value(t);
    }
  }
}

TEST(Penalty, UnbiasedRegions) {
  const Penalty scad = Penalty::scad(0.4, 3.7);
  const Penalty hard = Penalty::hard(0.4);
  for (double t = 0.0; t < 5.0; t += 0.01) {
    if (t >= 3.7 * 0.4) EXPECT_EQ(scad.derivative(t), 0.0);
    if (t >= 0.4) EXPECT_EQ(hard.derivative(t), 0.0);
  }
}
