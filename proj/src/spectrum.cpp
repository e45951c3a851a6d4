#include "jlflux/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "jlflux/error.hpp"
#include "jlflux/io.hpp"

namespace jlflux {

SpectrumSolver::SpectrumSolver(int n, double a, SpectrumOptions options)
    : angular_(n, a, options.grid), measure_(WeightedMeasure::composite(n, a)), options_(options) {}

Mismatch SpectrumSolver::flux_mismatch(double lambda, double beta) const {
  const AngularProfile y = angular_.solve(-lambda);
  return {y.flux() - beta * y.boundary_value(), y.sign_changes()};
}

int SpectrumSolver::count_below(double lambda, double beta) const {
  const AngularProfile y = angular_.solve(-lambda);
  const double mismatch = y.flux() - beta * y.boundary_value();
  // flux / y_B < beta  <=>  mismatch and y_B have opposite signs
  return y.sign_changes() + ((mismatch * y.boundary_value() < 0.0) ? 1 : 0);
}

std::vector<EigenPair> SpectrumSolver::eigenpairs(double beta, int k) const {
  if (k < 1) fail_validation("spectrum.bad_count", "need at least one eigenpair");
  if (!std::isfinite(beta)) fail_validation("spectrum.bad_beta", "Robin coefficient must be finite");
  const double d = angular_.n() + angular_.a() - 2.0;

  std::map<double, int> counts;  // lambda -> eigenvalues below lambda
  auto count = [&](double lambda) {
    auto it = counts.find(lambda);
    if (it != counts.end()) return it->second;
    const int c = count_below(lambda, beta);
    counts.emplace(lambda, c);
    return c;
  };

  double lo = -2.0 * std::max(d * d, 1.0);
  for (int tries = 0; count(lo) > 0; ++tries) {
    if (tries == 60) fail_numerical("spectrum.no_lower_bound", "cannot bracket the first eigenvalue");
    lo *= 2.0;
  }
  double hi = std::max(1.0, std::abs(lo));
  while (count(hi) < k) {
    if (hi >= options_.lambda_ceiling) {
      std::ostringstream msg;
      msg << "only " << count(hi) << " of " << k << " eigenvalues lie below the ceiling "
          << options_.lambda_ceiling;
      fail_numerical("spectrum.ceiling_reached", msg.str());
    }
    hi = std::min(2.0 * hi, options_.lambda_ceiling);
  }

  std::vector<EigenPair> pairs;
  pairs.reserve(k);
  for (int i = 1; i <= k; ++i) {
    // Tightest known bracket: count(left) < i <= count(right).
    double left = lo, right = hi;
    for (const auto& [lam, c] : counts) {
      if (c < i) left = std::max(left, lam);
      else right = std::min(right, lam);
    }
    while (right - left > options_.tolerance) {
      const double mid = 0.5 * (left + right);
      if (mid <= left || mid >= right) break;
      if (count(mid) < i) left = mid;
      else right = mid;
    }
    EigenPair ep;
    ep.index = i;
    ep.lambda = 0.5 * (left + right);
    AngularProfile y = angular_.solve(-ep.lambda);
    const double sign = y.boundary_value() < 0.0 ? -1.0 : 1.0;
    const double nrm = norm([&](double t) { return y.value(t); }, measure_);
    if (!(nrm > 0.0)) fail_numerical("spectrum.zero_eigenfunction", "eigenfunction has zero norm");
    ep.profile = y.scaled(sign / nrm);
    ep.boundary_value = ep.profile.boundary_value();
    const double n2 = inner_product([&](double t) { return ep.profile.value(t); },
                                    [&](double t) { return ep.profile.value(t); }, measure_);
    ep.norm_residual = std::abs(n2 - 1.0);
    ep.zero_count = ep.profile.sign_changes();
    pairs.push_back(std::move(ep));
  }
  return pairs;
}

double SpectrumSolver::compute_Ca() const {
  const double d = angular_.n() + angular_.a() - 2.0;
  const AngularProfile y = angular_.solve(d * d / 4.0);
  if (!(y.boundary_value() > 0.0))
    fail_numerical("spectrum.inconsistent_profile", "boundary value of the Hardy profile is not positive");
  const double ca = y.flux() / y.boundary_value();
  if (!(ca > 0.0)) fail_numerical("spectrum.inconsistent_profile", "trace constant is not positive");
  return ca;
}

Mismatch flux_mismatch(double lambda, double beta, int n, double a, AngularGrid grid) {
  const AngularProfile y = AngularSolver(n, a, grid).solve(-lambda);
  return {y.flux() - beta * y.boundary_value(), y.sign_changes()};
}

std::vector<EigenPair> eigenpairs(double beta, int n, double a, int count, SpectrumOptions options) {
  return SpectrumSolver(n, a, options).eigenpairs(beta, count);
}

double compute_Ca(int n, double a, AngularGrid grid) {
  SpectrumOptions opt;
  opt.grid = grid;
  return SpectrumSolver(n, a, opt).compute_Ca();
}

double rayleigh_quotient(const AngularProfile& profile, double beta, const WeightedMeasure& measure) {
  const double e2 = weighted_integral(
      [&](double t) {
        const double v = profile.value(t);
        return v * v;
      },
      measure);
  if (!(e2 > 0.0)) fail_validation("spectrum.zero_norm", "trial function has zero weighted norm");
  const double de2 = weighted_integral(
      [&](double t) {
        const double v = profile.derivative_at(t);
        return v * v;
      },
      measure);
  const double eb = profile.boundary_value();
  return (de2 - beta * eb * eb) / e2;
}

void write_eigen_csv(std::ostream& out, const std::vector<EigenPair>& pairs) {
  out << "index,lambda,e_B,norm_residual,zero_count\n";
  for (const auto& p : pairs)
    out << p.index << ',' << format_double(p.lambda) << ',' << format_double(p.boundary_value) << ','
        << format_double(p.norm_residual) << ',' << p.zero_count << '\n';
}

}  // namespace jlflux
