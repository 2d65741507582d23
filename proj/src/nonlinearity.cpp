#include "dsnld/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsnld/errors.hpp"

namespace dsnld {

NonlinearitySpec NonlinearitySpec::linear() {
  NonlinearitySpec s;
  s.kind = Kind::linear;
  return s;
}

NonlinearitySpec NonlinearitySpec::power_law(double m, double u_max) {
  if (!(m > 1.0)) throw DomainError("power_law exponent must exceed 1");
  if (!(u_max > 0.0)) throw DomainError("power_law truncation must be positive");
  NonlinearitySpec s;
  s.kind = Kind::power_law;
  s.m = m;
  s.u_max = u_max;
  return s;
}

NonlinearitySpec NonlinearitySpec::stefan(double u_c, double slope, double u_max) {
  if (u_c < 0.0 || !(slope > 0.0)) throw DomainError("stefan needs u_c >= 0 and slope > 0");
  NonlinearitySpec s;
  s.kind = Kind::stefan;
  s.u_c = u_c;
  s.slope = slope;
  s.u_max = u_max;
  return s;
}

NonlinearitySpec NonlinearitySpec::from_table(std::vector<std::pair<double, double>> samples,
                                              double u_max) {
  if (samples.empty()) throw DomainError("table nonlinearity needs samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw DomainError("table abscissae must be strictly increasing");
  NonlinearitySpec s;
  s.kind = Kind::table;
  s.u_max = u_max;
  if (samples.front().first > 0.0) samples.insert(samples.begin(), {0.0, 0.0});
  samples.front().second = 0.0;  // psi(0) = 0 by assumption
  s.table = std::move(samples);
  return s;
}

double NonlinearitySpec::lipschitz() const {
  switch (kind) {
    case Kind::linear: return 1.0;
    case Kind::power_law: return m * std::pow(u_max, m - 1.0);
    case Kind::stefan: return slope;
    case Kind::table: {
      double worst = 0.0;
      for (std::size_t i = 1; i < table.size(); ++i)
        worst = std::max(worst, std::abs((table[i].second - table[i - 1].second) /
                                         (table[i].first - table[i - 1].first)));
      return worst > 0 ? worst : 1.0;
    }
  }
  return 1.0;
}

bool NonlinearitySpec::degenerate() const {
  switch (kind) {
    case Kind::linear: return false;
    case Kind::power_law: return m > 1.0;
    case Kind::stefan: return u_c > 0.0;
    case Kind::table: {
      if (table.size() < 2) return false;
      const double s0 = table[1].second / table[1].first;
      return s0 <= 1e-12 * lipschitz();
    }
  }
  return false;
}

std::string NonlinearitySpec::describe() const {
  switch (kind) {
    case Kind::linear: return "linear";
    case Kind::power_law:
      return "power_law(m=" + std::to_string(m) + ",u_max=" + std::to_string(u_max) + ")";
    case Kind::stefan:
      return "stefan(u_c=" + std::to_string(u_c) + ",slope=" + std::to_string(slope) + ")";
    case Kind::table: return "table(" + std::to_string(table.size()) + " samples)";
  }
  return "?";
}

namespace {

double psi_nonneg(const NonlinearitySpec& spec, double u) {
  switch (spec.kind) {
    case NonlinearitySpec::Kind::linear: return u;
    case NonlinearitySpec::Kind::power_law: {
      if (u <= spec.u_max) return std::pow(u, spec.m);
      const double slope = spec.m * std::pow(spec.u_max, spec.m - 1.0);
      return std::pow(spec.u_max, spec.m) + slope * (u - spec.u_max);
    }
    case NonlinearitySpec::Kind::stefan: return u <= spec.u_c ? 0.0 : spec.slope * (u - spec.u_c);
    case NonlinearitySpec::Kind::table: {
      const auto& t = spec.table;
      if (u <= t.front().first) return 0.0;
      auto it = std::lower_bound(t.begin(), t.end(), u,
                                 [](const auto& s, double v) { return s.first < v; });
      if (it == t.end()) {
        const auto& a = t[t.size() - 2];
        const auto& b = t.back();
        const double slope = (b.second - a.second) / (b.first - a.first);
        return b.second + slope * (u - b.first);
      }
      const auto& b = *it;
      const auto& a = *(it - 1);
      const double w = (u - a.first) / (b.first - a.first);
      return a.second + w * (b.second - a.second);
    }
  }
  return 0.0;
}

/// lim_{u -> 0+} psi(u)/u, analytic per kind.
double phi_sq_at_zero(const NonlinearitySpec& spec) {
  switch (spec.kind) {
    case NonlinearitySpec::Kind::linear: return 1.0;
    case NonlinearitySpec::Kind::power_law: return spec.m > 1.0 ? 0.0 : 1.0;
    case NonlinearitySpec::Kind::stefan: return spec.u_c > 0.0 ? 0.0 : spec.slope;
    case NonlinearitySpec::Kind::table:
      return spec.table.size() >= 2 ? spec.table[1].second / spec.table[1].first : 0.0;
  }
  return 0.0;
}

}  // namespace

double psi_eval(const NonlinearitySpec& spec, double u) {
  // odd extension keeps sign symmetry for small negative KDE artifacts
  return u < 0.0 ? -psi_nonneg(spec, -u) : psi_nonneg(spec, u);
}

double phi_eval(const NonlinearitySpec& spec, double u) {
  const double a = std::abs(u);
  if (a == 0.0) return std::sqrt(phi_sq_at_zero(spec));
  return std::sqrt(psi_nonneg(spec, a) / a);
}

double phi_kappa_eval(const NonlinearitySpec& spec, double kappa, double u) {
  if (kappa < 0.0) throw DomainError("kappa must be non-negative");
  if (kappa == 0.0) return phi_eval(spec, u);
  const double phi = phi_eval(spec, u);
  return std::sqrt(phi * phi + kappa);
}

double psi_kappa_eval(const NonlinearitySpec& spec, double kappa, double u) {
  if (kappa < 0.0) throw DomainError("kappa must be non-negative");
  return psi_eval(spec, u) + kappa * u;
}

bool SpecValidation::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SpecCheck& c) { return c.pass; });
}

SpecValidation validate_spec(const NonlinearitySpec& spec, int n_samples) {
  if (n_samples < 100) throw DomainError("validate_spec needs n_samples >= 100");
  const double L = spec.lipschitz();
  SpecValidation v;

  v.checks.push_back({"psi_zero", psi_eval(spec, 0.0) == 0.0, std::abs(psi_eval(spec, 0.0))});

  double worst_mono = -1.0, worst_lin = -1.0, worst_phi = -1.0, worst_fac = -1.0, worst_odd = 0.0;
  double prev = psi_eval(spec, 0.0);
  for (int k = 1; k <= n_samples; ++k) {
    const double u = spec.u_max * k / n_samples;
    const double p = psi_eval(spec, u);
    worst_mono = std::max(worst_mono, prev - p);
    prev = p;
    worst_lin = std::max(worst_lin, std::abs(p) - L * u * (1 + 1e-12));
    const double phi = phi_eval(spec, u);
    worst_phi = std::max(worst_phi, phi - std::sqrt(L) * (1 + 1e-12));
    worst_fac = std::max(worst_fac, std::abs(phi * phi * u - p) - 1e-12 * (1.0 + std::abs(p)));
    worst_odd = std::max(worst_odd, std::abs(psi_eval(spec, -u) + p));
  }
  // truncated continuation must stay within the linear-growth envelope
  for (int k = 1; k <= n_samples; ++k) {
    const double u = spec.u_max * (1.0 + 2.0 * k / n_samples);
    worst_lin = std::max(worst_lin, std::abs(psi_eval(spec, u)) - L * u * (1 + 1e-12));
  }
  v.checks.push_back({"monotone", worst_mono <= 0.0, worst_mono});
  v.checks.push_back({"linear_growth", worst_lin <= 0.0, worst_lin});
  v.checks.push_back({"phi_bounded", worst_phi <= 0.0, worst_phi});
  v.checks.push_back({"factorization", worst_fac <= 0.0, worst_fac});
  v.checks.push_back({"odd_extension", worst_odd == 0.0, worst_odd});

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double u : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const double r = psi_eval(spec, u) / u;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  v.checks.push_back({"limit_at_zero", hi - lo < 1e-3 * L, (hi - lo) - 1e-3 * L});
  return v;
}

}  // namespace dsnld
