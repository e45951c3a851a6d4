#pragma once

#include <iosfwd>
#include <vector>

#include "jlflux/angular_profile.hpp"
#include "jlflux/quadrature.hpp"

namespace jlflux {

// Robin problem -Delta_{S,a} e = lambda e with lim cos^a(theta) e_theta = beta e_B.
struct EigenPair {
  int index = 0;
  double lambda = 0.0;
  AngularProfile profile;  // normalized, boundary value positive
  double boundary_value = 0.0;
  double norm_residual = 0.0;  // |int e^2 dmu - 1|
  int zero_count = 0;          // interior sign changes
};

struct Mismatch {
  double mismatch;  // flux - beta * y_B for the regular solution with y(0) = 1
  int zero_count;   // sign changes of y on (0, pi/2], the endpoint value included
};

struct SpectrumOptions {
  AngularGrid grid;
  double tolerance = 1e-12;       // bisection width in lambda
  double lambda_ceiling = 1e6;    // upper limit of the bracket search
};

class SpectrumSolver {
 public:
  SpectrumSolver(int n, double a, SpectrumOptions options = {});

  Mismatch flux_mismatch(double lambda, double beta) const;

  // Number of Robin eigenvalues strictly below lambda: interior sign
  // changes of y plus one when flux/y_B < beta.
  int count_below(double lambda, double beta) const;

  // First k eigenpairs in increasing order. Throws
  // Error(Numerical, "spectrum.ceiling_reached") if fewer than k eigenvalues
  // lie below the ceiling.
  std::vector<EigenPair> eigenpairs(double beta, int k) const;

  // flux / y_B for kappa = (n+a-2)^2/4.
  double compute_Ca() const;

  const AngularSolver& angular() const noexcept { return angular_; }
  const WeightedMeasure& measure() const noexcept { return measure_; }

 private:
  AngularSolver angular_;
  WeightedMeasure measure_;
  SpectrumOptions options_;
};

Mismatch flux_mismatch(double lambda, double beta, int n, double a, AngularGrid grid = {});
std::vector<EigenPair> eigenpairs(double beta, int n, double a, int count,
                                  SpectrumOptions options = {});
double compute_Ca(int n, double a, AngularGrid grid = {});

// (||e_theta||^2 - beta e_B^2) / ||e||^2 in the weighted L^2 norm.
double rayleigh_quotient(const AngularProfile& profile, double beta,
                         const WeightedMeasure& measure);

// Columns: index, lambda, e_B, norm_residual, zero_count.
void write_eigen_csv(std::ostream& out, const std::vector<EigenPair>& pairs);

}  // namespace jlflux
