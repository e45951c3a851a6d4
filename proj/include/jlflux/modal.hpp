#pragma once

#include <functional>
#include <vector>

#include "jlflux/classifier.hpp"
#include "jlflux/params.hpp"

namespace jlflux {

using Forcing = std::function<double(double)>;

// Cubic B-spline through samples on a uniform grid starting at t0.
Forcing sampled_forcing(double t0, double dt, std::vector<double> samples);

struct TimeGrid {
  double horizon = 20.0;
  int steps = 2000;
};

// z_i on a uniform grid for z'' + sigma z' - (gamma + lambda_i) z = f_i.
struct ModalTrajectory {
  int index = 0;
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> forcing;
};

// g(w) = V_B^q - (V_B - w)^q - q V_B^{q-1} w; requires V_B - w > 0.
double nonlinearity_g(double w, double v_b, double q);

// Closed-form Duhamel representation.
// i >= 2: the solution bounded as t -> infinity with z(0) = z0 (z0prime is
// not used; the implied slope is rho^- z0 - int_0^inf e^{-rho^+ s} f ds).
// The improper integral is split at the horizon and the tail is taken from
// an exponential fitted to the last tenth of the forcing samples; throws
// Error(Numerical, "modal.divergent_tail") when that tail does not decay
// faster than e^{rho^+ t}.
// i = 1: the initial-value solution in the form matching jl_class; throws
// Error(Validation, "modal.class_mismatch") when the discriminant sign does
// not fit the class (critical uses the double root -sigma/2 regardless).
ModalTrajectory duhamel_solution(int i, double lambda, double z0, double z0prime,
                                 const Forcing& forcing, const DerivedConstants& constants,
                                 JLClass jl_class, TimeGrid grid = {});

// Initial-value integration with RK4, substeps doubled until two successive
// answers agree to tol on the output grid.
ModalTrajectory ode_direct(int i, double lambda, double z0, double z0prime, const Forcing& forcing,
                           const DerivedConstants& constants, TimeGrid grid = {},
                           double tol = 1e-10);

// Max-norm centered-difference residual of
//   vbar'' + sigma vbar' - gamma vbar + v_B^q = 0
// on interior nodes of a uniform grid.
double vbar_residual(const std::vector<double>& t, const std::vector<double>& vbar,
                     const std::vector<double>& v_b, const DerivedConstants& constants, double q);

enum class DecayModel { PureExponential, LinearTimesExponential, OscillatoryExponential };

const char* to_string(DecayModel m);

struct FitWindow {
  double transient_fraction = 0.3;  // leading part of the trajectory skipped
  double end_fraction = 1.0;        // fit up to this fraction of the trajectory
  double residual_cap = 1.0;        // max misfit relative to max |z| in the window
};

struct DecayFit {
  DecayModel model = DecayModel::PureExponential;
  double rate = 0.0;       // exponent of the envelope
  double xi1 = 0.0;        // amplitude, t-coefficient, or sine coefficient
  double xi2 = 0.0;        // zero, constant, or cosine coefficient
  double frequency = 0.0;  // oscillatory model only
  double residual = 0.0;   // max |z - model| over the window
  double t_begin = 0.0, t_end = 0.0;
};

// Model chosen by class: supercritical log-linear fit, critical
// (xi1 t + xi2) e^{-sigma t/2}, subcritical (xi1 sin Kt + xi2 cos Kt) e^{-sigma t/2}
// with K from the report.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& z, const JLReport& report,
                   FitWindow window = {});

DecayFit fit_pure_exponential(const std::vector<double>& t, const std::vector<double>& z,
                              FitWindow window = {});
DecayFit fit_linear_times_exponential(const std::vector<double>& t, const std::vector<double>& z,
                                      double sigma, FitWindow window = {});
DecayFit fit_oscillatory(const std::vector<double>& t, const std::vector<double>& z, double sigma,
                         double K, FitWindow window = {});

// Rate and frequency both free: two-term linear prediction (Prony) on the
// window, z_{k+2} = p z_{k+1} + r z_k, then a linear fit of the amplitudes.
DecayFit fit_oscillatory_free(const std::vector<double>& t, const std::vector<double>& z,
                              FitWindow window = {});

}  // namespace jlflux
