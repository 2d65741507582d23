#ifndef DSNLD_NONLINEARITY_HPP
#define DSNLD_NONLINEARITY_HPP

#include <string>
#include <utility>
#include <vector>

// The diffusion nonlinearity psi and its square-root factorization
// psi(u) = Phi(u)^2 * u, with the kappa-regularization
// Phi_kappa = sqrt(Phi^2 + kappa) that restores non-degeneracy.
//
// psi is odd-extended (psi(-u) = -psi(u)), non-decreasing on [0, u_max],
// Lipschitz, and psi(u)/u has a limit at 0+. Built-in kinds:
//   linear                 psi(u) = u
//   power_law(m, u_max)    psi(u) = u^m on [0, u_max], then continued
//                          linearly with slope m * u_max^{m-1}
//   stefan(u_c, slope)     psi(u) = slope * (u - u_c)_+  (flat on [0, u_c])
//   table                  monotone linear interpolation of samples,
//                          continued linearly past the last sample

namespace dsnld {

struct NonlinearitySpec {
  enum class Kind { linear, power_law, stefan, table };

  Kind kind = Kind::linear;
  double m = 1.0;           // power-law exponent (> 1)
  double u_max = 1.0;       // truncation point / working range
  double u_c = 0.0;         // degeneracy threshold (0 when non-degenerate)
  double slope = 1.0;       // stefan slope past u_c
  std::vector<std::pair<double, double>> table;  // (u, psi(u)), u ascending

  static NonlinearitySpec linear();
  static NonlinearitySpec power_law(double m, double u_max);
  static NonlinearitySpec stefan(double u_c, double slope, double u_max);
  static NonlinearitySpec from_table(std::vector<std::pair<double, double>> samples,
                                     double u_max);

  /// Lipschitz constant of psi on the working range.
  double lipschitz() const;

  /// alpha with (psi(r)-psi(r1))(r-r1) >= alpha (psi(r)-psi(r1))^2, taken
  /// as 1/L for L-Lipschitz psi.
  double alpha() const { return 1.0 / lipschitz(); }

  /// True when lim_{u->0+} Phi(u) = 0.
  bool degenerate() const;

  std::string describe() const;
};

double psi_eval(const NonlinearitySpec& spec, double u);
double phi_eval(const NonlinearitySpec& spec, double u);

/// sqrt(phi_eval(u)^2 + kappa); kappa = 0 reduces to phi_eval.
double phi_kappa_eval(const NonlinearitySpec& spec, double kappa, double u);

/// psi_kappa(u) = (Phi^2(u) + kappa) u.
double psi_kappa_eval(const NonlinearitySpec& spec, double kappa, double u);

struct SpecCheck {
  std::string name;
  bool pass;
  double worst;  // worst sampled violation, negative means margin
};

struct SpecValidation {
  std::vector<SpecCheck> checks;
  bool all_pass() const;
};

/// Sample-based validation of the structural assumptions on psi:
/// psi(0) = 0, monotone on [0, u_max], |psi(u)| <= L|u|, psi(u)/u settles
/// near 0+, Phi bounded by sqrt(L), factorization consistency.
SpecValidation validate_spec(const NonlinearitySpec& spec, int n_samples);

}  // namespace dsnld

#endif
