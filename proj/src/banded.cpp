#include "jlflux/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jlflux/error.hpp"

// Unblocked band LU from LAPACK. The blocked dgbtrf shipped with the system
// LAPACK returns wrong factors once kl exceeds its block size of 64.
extern "C" void dgbtf2_(const lapack_int* m, const lapack_int* n, const lapack_int* kl,
                        const lapack_int* ku, double* ab, const lapack_int* ldab, lapack_int* ipiv,
                        lapack_int* info);

namespace jlflux {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
  if (n < 1 || kl < 0 || ku < 0) fail_validation("banded.bad_shape", "invalid band matrix shape");
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
  ipiv_.assign(n_, 0);
}

void BandedMatrix::set_zero() {
  std::fill(ab_.begin(), ab_.end(), 0.0);
  factored_ = false;
}

double& BandedMatrix::at(int i, int j) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_) {
    std::ostringstream os;
    os << "entry (" << i << ", " << j << ") lies outside the band";
    fail_validation("banded.out_of_band", os.str());
  }
  return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

double BandedMatrix::get(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_) return 0.0;
  return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

void BandedMatrix::factor() {
  // Row and column equilibration first, so the condition estimate reflects
  // the scaled system rather than the spread of node masses.
  row_scale_.assign(n_, 1.0);
  col_scale_.assign(n_, 1.0);
  double rowcnd = 0.0, colcnd = 0.0, amax = 0.0;
  lapack_int info = LAPACKE_dgbequ(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data() + kl_, ldab_,
                                   row_scale_.data(), col_scale_.data(), &rowcnd, &colcnd, &amax);
  if (info < 0) fail_numerical("banded.lapack", "dgbequ rejected its arguments");
  if (info > 0) {
    std::ostringstream os;
    os << "band matrix of order " << n_ << " has an empty row or column";
    fail_numerical("banded.singular", os.str());
  }
  for (int j = 0; j < n_; ++j)
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
      ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] *= row_scale_[i] * col_scale_[j];

  double anorm = 0.0;
  for (int j = 0; j < n_; ++j) {
    double col = 0.0;
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) col += std::abs(get(i, j));
    anorm = std::max(anorm, col);
  }
  dgbtf2_(&n_, &n_, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info < 0) fail_numerical("banded.lapack", "dgbtf2 rejected its arguments");
  double rc = 0.0;
  if (info == 0)
    LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', n_, kl_, ku_, ab_.data(), ldab_, ipiv_.data(), anorm, &rc);
  rcond_ = rc;
  if (info > 0 || !(rc > 1e-15)) {
    std::ostringstream os;
    os << "band matrix of order " << n_ << " is singular (reciprocal condition estimate " << rc << ")";
    fail_numerical("banded.singular", os.str());
  }
  factored_ = true;
}

void BandedMatrix::solve(std::vector<double>& rhs) const {
  if (!factored_) fail_validation("banded.not_factored", "solve called before factor");
  if (static_cast<int>(rhs.size()) != n_) fail_validation("banded.size_mismatch", "right-hand side has wrong length");
  for (int i = 0; i < n_; ++i) rhs[i] *= row_scale_[i];
  const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                                         ipiv_.data(), rhs.data(), n_);
  if (info != 0) fail_numerical("banded.lapack", "dgbtrs failed");
  for (int i = 0; i < n_; ++i) rhs[i] *= col_scale_[i];
}

}  // namespace jlflux
