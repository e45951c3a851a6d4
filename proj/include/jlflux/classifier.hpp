#pragma once

#include <optional>
#include <string>

#include "jlflux/angular_profile.hpp"
#include "jlflux/params.hpp"

namespace jlflux {

enum class JLClass { Supercritical, Critical, Subcritical };

const char* to_string(JLClass c);

struct JLReport {
  ProblemParams params;
  DerivedConstants constants;
  double C_a = 0.0;
  double V_B = 0.0;
  double beta = 0.0;  // q V_B^{q-1}
  double J = 0.0;     // C_a - q V_B^{q-1}
  JLClass jl_class = JLClass::Subcritical;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double discriminant1 = 0.0;  // sigma^2 + 4 (gamma + lambda1)
  double discriminant2 = 0.0;  // sigma^2 + 4 (gamma + lambda2)
  std::optional<double> rho1_plus, rho1_minus;  // supercritical or critical
  std::optional<double> rho1;                   // = |rho1_plus|
  std::optional<double> K;                      // subcritical only
  double rho2 = 0.0;                            // (sigma + sqrt(discriminant2)) / 2
  double tolerance = 1e-9;
};

struct ClassifyOptions {
  double tolerance = 1e-9;  // |J| <= tolerance is Critical
  AngularGrid grid;
};

// Requires q >= q_crit. Throws Error(Numerical, "classifier.inconsistent_signs")
// when sign(J) and sign(discriminant1) disagree outside the tolerance band.
JLReport jl_classify(const ProblemParams& params, ClassifyOptions options = {});

// J(q) = C_a - q V_B^{q-1} alone (no eigenvalues).
double jl_functional(const ProblemParams& params, AngularGrid grid = {});

// Bisection for a root of J on [q_lo, q_hi]; J must change sign there.
double jl_threshold(int n, double a, double q_lo, double q_hi, double q_tol = 1e-13,
                    AngularGrid grid = {});

// G(tau) = (1 - a + tau)((n+a-2) - tau) - (n+a-2)^2/4
double g_function(int n, double a, double tau);

struct GAnalysis {
  double tau_lo = 0.0;  // open end
  double tau_hi = 0.0;  // (n+a-2)/2, closed end
  double inf_value = 0.0;
  double inf_location = 0.0;
};

// Requires a in (-1, 0).
GAnalysis g_analysis(int n, double a);

// Roots of rho^2 + sigma rho - (gamma + lambda) = 0.
struct ModalRoots {
  double discriminant;  // sigma^2 + 4 (gamma + lambda)
  bool real;
  double rho_minus, rho_plus;  // real case, rho_minus <= rho_plus
  double real_part, imag_part;  // complex case: -sigma/2 +- i K
};

ModalRoots modal_roots(double lambda, const DerivedConstants& constants);

}  // namespace jlflux
