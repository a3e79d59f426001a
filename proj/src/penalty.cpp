#include "sparsecov/penalty.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "sparsecov/errors.hpp"

namespace sparsecov {

Penalty::Penalty(PenaltyFamily family, double lambda, double a) : family_(family), lambda_(lambda), a_(a) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("penalty lambda must be finite and >= 0");
  }
  if (family == PenaltyFamily::SCAD && !(a > 2.0 && std::isfinite(a))) {
    throw InvalidInput("SCAD shape a must exceed 2");
  }
}

Penalty Penalty::l1(double lambda) { return Penalty(PenaltyFamily::L1, lambda, kDefaultScadShape); }
Penalty Penalty::scad(double lambda, double a) { return Penalty(PenaltyFamily::SCAD, lambda, a); }
Penalty Penalty::hard(double lambda) { return Penalty(PenaltyFamily::Hard, lambda, kDefaultScadShape); }

Penalty Penalty::with_lambda(double lambda) const { return Penalty(family_, lambda, a_); }

double Penalty::value(double theta) const {
  const double t = std::abs(theta);
  const double lam = lambda_;
  switch (family_) {
    case PenaltyFamily::L1:
      return lam * t;
    case PenaltyFamily::Hard:
      return t < lam ? lam * lam - (t - lam) * (t - lam) : lam * lam;
    case PenaltyFamily::SCAD:
      if (t <= lam) return lam * t;
      if (t <= a_ * lam) return (2.0 * a_ * lam * t - t * t - lam * lam) / (2.0 * (a_ - 1.0));
      return 0.5 * (a_ + 1.0) * lam * lam;
  }
  return 0.0;
}

double Penalty::derivative(double theta) const {
  const double t = std::abs(theta);
  const double lam = lambda_;
  switch (family_) {
    case PenaltyFamily::L1:
      return lam;
    case PenaltyFamily::Hard:
      return t < lam ? 2.0 * (lam - t) : 0.0;
    case PenaltyFamily::SCAD:
      if (t <= lam) return lam;
      return std::max(a_ * lam - t, 0.0) / (a_ - 1.0);
  }
  return 0.0;
}

std::string family_name(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::L1:
      return "l1";
    case PenaltyFamily::SCAD:
      return "scad";
    case PenaltyFamily::Hard:
      return "hard";
  }
  return "?";
}

namespace {

double parse_real(std::string_view field, std::string_view spec) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidInput("cannot parse penalty '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

Penalty parse_penalty(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  const std::string_view name = parts.front();
  if (name == "l1" && parts.size() == 2) return Penalty::l1(parse_real(parts[1], spec));
  if (name == "hard" && parts.size() == 2) return Penalty::hard(parse_real(parts[1], spec));
  if (name == "scad" && parts.size() == 2) return Penalty::scad(parse_real(parts[1], spec));
  if (name == "scad" && parts.size() == 3) {
    return Penalty::scad(parse_real(parts[1], spec), parse_real(parts[2], spec));
  }
  throw InvalidInput("cannot parse penalty '" + std::string(spec) +
                     "' (expected l1:LAMBDA, scad:LAMBDA[:A] or hard:LAMBDA)");
}

std::string to_string(const Penalty& pen) {
  std::ostringstream os;
  os.precision(17);
  os << family_name(pen.family()) << ":" << pen.lambda();
  if (pen.family() == PenaltyFamily::SCAD) os << ":" << pen.shape();
  return os.str();
}

}  // namespace sparsecov
