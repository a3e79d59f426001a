#pragma once

#include <string>
#include <string_view>

namespace sparsecov {

enum class PenaltyFamily { L1, SCAD, Hard };

/// Penalty p_lambda applied to off-diagonal magnitudes.
///
///   L1:   p(t) = lambda |t|
///   Hard: p(t) = lambda^2 - (|t| - lambda)^2 1{|t| < lambda}
///   SCAD: p'(t) = lambda 1{t <= lambda} + (a lambda - t)_+ 1{t > lambda} / (a - 1)
///
/// All three are even, vanish at zero and are concave in |t|, so their tangent
/// line at any point majorizes them on [0, inf).
class Penalty {
 public:
  static constexpr double kDefaultScadShape = 3.7;

  static Penalty l1(double lambda);
  static Penalty scad(double lambda, double a = kDefaultScadShape);
  static Penalty hard(double lambda);

  PenaltyFamily family() const { return family_; }
  double lambda() const { return lambda_; }
  double shape() const { return a_; }

  /// Same family and shape, different lambda.
  Penalty with_lambda(double lambda) const;

  double value(double theta) const;

  /// Right derivative at theta >= 0. SCAD at theta == lambda uses the first branch.
  double derivative(double theta) const;

  /// lim_{t -> 0+} p(t) / t.
  double slope_at_zero() const { return derivative(0.0); }

 private:
  Penalty(PenaltyFamily family, double lambda, double a);

  PenaltyFamily family_ = PenaltyFamily::L1;
  double lambda_ = 0.0;
  double a_ = kDefaultScadShape;
};

/// "l1:0.1", "scad:0.1:3.7" (shape optional, default 3.7), "hard:0.1".
Penalty parse_penalty(std::string_view spec);
std::string to_string(const Penalty& pen);
std::string family_name(PenaltyFamily family);

}  // namespace sparsecov
