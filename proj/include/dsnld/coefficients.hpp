#ifndef DSNLD_COEFFICIENTS_HPP
#define DSNLD_COEFFICIENTS_HPP

#include <cmath>
#include <string>

namespace dsnld {

/// One noise coefficient e(xi): bounded with bounded first and second
/// derivatives. Built-in families carry their sup norms analytically so that
/// moment bounds and multiplier constants use exact values.
///
/// Families:
///   zero            e = 0
///   constant        e = a                        (flagged: not in H^1)
///   gaussian_bump   e = a * exp(-(xi-m)^2 / (2 s^2))
///   scaled_sine     e = a * sin(nu * xi + phase) (flagged: not in H^1)
///   sigmoid         e = a * tanh(s * (xi - c))   (flagged: not in H^1)
class Coefficient {
 public:
  enum class Family { zero, constant, gaussian_bump, scaled_sine, sigmoid };

  static Coefficient zero() { return Coefficient(Family::zero, 0, 0, 0); }
  static Coefficient constant(double a) { return Coefficient(Family::constant, a, 0, 0); }
  static Coefficient gaussian_bump(double a, double center, double width) {
    return Coefficient(Family::gaussian_bump, a, center, width);
  }
  static Coefficient scaled_sine(double a, double wavenumber, double phase) {
    return Coefficient(Family::scaled_sine, a, wavenumber, phase);
  }
  static Coefficient sigmoid(double a, double steepness, double center) {
    return Coefficient(Family::sigmoid, a, steepness, center);
  }

  double operator()(double xi) const {
    switch (family_) {
      case Family::zero: return 0.0;
      case Family::constant: return a_;
      case Family::gaussian_bump: {
        const double z = (xi - p_) / q_;
        return a_ * std::exp(-0.5 * z * z);
      }
      case Family::scaled_sine: return a_ * std::sin(p_ * xi + q_);
      case Family::sigmoid: return a_ * std::tanh(p_ * (xi - q_));
    }
    return 0.0;
  }

  double d1(double xi) const {
    switch (family_) {
      case Family::zero:
      case Family::constant: return 0.0;
      case Family::gaussian_bump: {
        const double z = (xi - p_) / q_;
        return -a_ * z / q_ * std::exp(-0.5 * z * z);
      }
      case Family::scaled_sine: return a_ * p_ * std::cos(p_ * xi + q_);
      case Family::sigmoid: {
        const double c = std::cosh(p_ * (xi - q_));
        return a_ * p_ / (c * c);
      }
    }
    return 0.0;
  }

  double d2(double xi) const {
    switch (family_) {
      case Family::zero:
      case Family::constant: return 0.0;
      case Family::gaussian_bump: {
        const double z = (xi - p_) / q_;
        return a_ * (z * z - 1.0) / (q_ * q_) * std::exp(-0.5 * z * z);
      }
      case Family::scaled_sine: return -a_ * p_ * p_ * std::sin(p_ * xi + q_);
      case Family::sigmoid: {
        const double t = std::tanh(p_ * (xi - q_));
        const double c = std::cosh(p_ * (xi - q_));
        return -2.0 * a_ * p_ * p_ * t / (c * c);
      }
    }
    return 0.0;
  }

  double sup() const { return std::abs(a_); }

  double sup_d1() const {
    switch (family_) {
      case Family::zero:
      case Family::constant: return 0.0;
      // max of |z e^{-z^2/2}| is e^{-1/2} at z = 1
      case Family::gaussian_bump: return std::abs(a_) / q_ * std::exp(-0.5);
      case Family::scaled_sine: return std::abs(a_ * p_);
      case Family::sigmoid: return std::abs(a_ * p_);
    }
    return 0.0;
  }

  double sup_d2() const {
    switch (family_) {
      case Family::zero:
      case Family::constant: return 0.0;
      // max of |(z^2-1) e^{-z^2/2}| is 1 at z = 0
      case Family::gaussian_bump: return std::abs(a_) / (q_ * q_);
      case Family::scaled_sine: return std::abs(a_ * p_ * p_);
      // max of |2 tanh(x) sech^2(x)| is 4 / (3 sqrt(3)) at tanh^2 = 1/3
      case Family::sigmoid: return std::abs(a_) * p_ * p_ * 4.0 / (3.0 * std::sqrt(3.0));
    }
    return 0.0;
  }

  /// Whether the coefficient decays enough to lie in H^1(R). Constant and
  /// periodic families do not; they are allowed but flagged in run metadata.
  bool in_h1() const {
    switch (family_) {
      case Family::zero: return true;
      case Family::constant: return a_ == 0.0;
      case Family::gaussian_bump: return true;
      case Family::scaled_sine: return a_ == 0.0;
      case Family::sigmoid: return a_ == 0.0;
    }
    return false;
  }

  bool is_zero() const { return family_ == Family::zero || a_ == 0.0; }

  Family family() const { return family_; }

  std::string describe() const {
    switch (family_) {
      case Family::zero: return "zero";
      case Family::constant: return "constant(" + std::to_string(a_) + ")";
      case Family::gaussian_bump:
        return "gaussian_bump(a=" + std::to_string(a_) + ",m=" + std::to_string(p_) +
               ",s=" + std::to_string(q_) + ")";
      case Family::scaled_sine:
        return "scaled_sine(a=" + std::to_string(a_) + ",nu=" + std::to_string(p_) +
               ",phase=" + std::to_string(q_) + ")";
      case Family::sigmoid:
        return "sigmoid(a=" + std::to_string(a_) + ",k=" + std::to_string(p_) +
               ",c=" + std::to_string(q_) + ")";
    }
    return "?";
  }

 private:
  Coefficient(Family f, double a, double p, double q) : family_(f), a_(a), p_(p), q_(q) {}

  Family family_;
  double a_;  // amplitude
  double p_;  // center / wavenumber / steepness
  double q_;  // width / phase / center
};

}  // namespace dsnld

#endif
