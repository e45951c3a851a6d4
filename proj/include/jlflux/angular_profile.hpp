#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "jlflux/params.hpp"
#include "jlflux/series.hpp"

namespace jlflux {

struct AngularGrid {
  int steps = 4096;  // uniform steps in theta over [0, pi/2]
};

// W(theta) = sin^{n-2}(theta) cos^a(theta). phi = pi/2 - theta is passed
// alongside so cos(theta) = sin(phi) stays accurate near pi/2.
double angular_weight(int n, double a, double theta, double phi);

// Solution of (W y')' = kappa W y on [0, pi/2] regular at 0. Sampled on a
// uniform grid (node k at theta = k*pi/(2*steps)) and evaluable anywhere:
// Frobenius series inside the two end windows, Hermite interpolation of
// the RK4 samples in between.
class AngularProfile {
 public:
  AngularProfile() = default;  // empty; only the sample spans are usable

  int n() const noexcept;
  double a() const noexcept;
  double kappa() const noexcept;
  int steps() const noexcept;

  std::span<const double> theta() const noexcept { return theta_; }
  std::span<const double> values() const noexcept { return values_; }
  // d/dtheta samples; the last entry is the limit at pi/2 (0 for a < 0,
  // +-infinity for a > 0 unless the flux vanishes).
  std::span<const double> derivative() const noexcept { return derivative_; }
  // G = W * d/dtheta samples; the last entry is the flux.
  std::span<const double> flux_variable() const noexcept { return flux_variable_; }

  double boundary_value() const noexcept { return values_.back(); }
  double flux() const noexcept { return flux_variable_.back(); }

  double value(double theta) const;
  double derivative_at(double theta) const;
  double flux_variable_at(double theta) const;

  // Profile multiplied by c (the equation is linear).
  AngularProfile scaled(double c) const;

  // Number of sign changes over the samples, the endpoint value included.
  int sign_changes() const;

  // Max over nodes with h <= theta <= pi/2 - margin of the conservative
  // three-point residual of (W y')' - kappa W y, relative to max |W y| *
  // max(1, |kappa|). Second order in the step.
  double equation_residual(double margin = 0.1) const;

 private:
  friend class AngularSolver;
  struct Core;

  std::shared_ptr<const Core> core_;
  double scale_ = 1.0;
  std::vector<double> theta_, values_, derivative_, flux_variable_;
};

// Reusable integrator for fixed (n, a, grid): weight tables and endpoint
// series coefficients are computed once.
class AngularSolver {
 public:
  AngularSolver(int n, double a, AngularGrid grid = {});

  // Throws Error(Numerical, "angular.overflow") with the reach point if the
  // solution stops being finite.
  AngularProfile solve(double kappa) const;

  int n() const noexcept { return n_; }
  double a() const noexcept { return a_; }
  int steps() const noexcept { return steps_; }

 private:
  int n_;
  double a_;
  int steps_;
  double h_;
  std::vector<double> w_node_, w_half_;
  std::vector<double> p_left_, p_right_;
};

AngularProfile integrate_angular(double kappa, int n, double a, AngularGrid grid = {});

// V = c * y where y = integrate_angular(gamma) and c = (flux / y_B^q)^{1/(q-1)}.
// Requires q > (n-1)/(n+a-2) so that gamma > 0.
AngularProfile singular_profile(const ProblemParams& params, const DerivedConstants& constants,
                                AngularGrid grid = {});

// Columns: theta, value, derivative, flux_variable.
void write_profile_csv(std::ostream& out, const AngularProfile& profile);

}  // namespace jlflux
