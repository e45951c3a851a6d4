#pragma once

#include <vector>

namespace jlflux {

// Square band matrix in LAPACK general-band storage, factored in place by
// partial-pivoting LU. Entries outside the band are rejected.
class BandedMatrix {
 public:
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  void set_zero();
  double& at(int i, int j);
  double get(int i, int j) const;
  void add(int i, int j, double x) { at(i, j) += x; }

  // Equilibrated LU factorization. Throws Error(Numerical, "banded.singular") with a
  // reciprocal condition estimate when the matrix is singular to working
  // precision.
  void factor();
  bool factored() const { return factored_; }
  double rcond() const { return rcond_; }

  // Solves in place using the factorization.
  void solve(std::vector<double>& rhs) const;

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  std::vector<double> row_scale_, col_scale_;
  bool factored_ = false;
  double rcond_ = 0.0;
};

}  // namespace jlflux
