#include "jlflux/cylinder.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jlflux/banded.hpp"
#include "jlflux/error.hpp"
#include "jlflux/io.hpp"

namespace jlflux {

namespace {

// mu-mass of [0, u] and of [u, 1]; the second form is used near u = 1 where
// the first would cancel.
struct MassFunction {
  double be1, al1, half_total;
  MassFunction(int n, double a)
      : be1((n - 1) / 2.0), al1((a + 1.0) / 2.0), half_total(0.5 * boost::math::beta(be1, al1)) {}
  double head(double u, double t) const {
    return u < 0.5 ? half_total * boost::math::ibeta(be1, al1, u)
                   : half_total * (1.0 - boost::math::ibeta(al1, be1, t));
  }
  double tail(double u, double t) const {
    return u < 0.5 ? half_total * (1.0 - boost::math::ibeta(be1, al1, u))
                   : half_total * boost::math::ibeta(al1, be1, t);
  }
};


std::size_t idx(int j, int k, int nodes) { return static_cast<std::size_t>(j) * nodes + k; }

void check_mesh_args(int n, double a, int cells) {
  if (n < 3) fail_validation("cylinder.bad_n", "n must be at least 3");
  if (!(a > -1.0 && a < 1.0)) fail_validation("cylinder.bad_a", "a must lie in (-1, 1)");
  if (cells < 4) fail_validation("cylinder.bad_grid", "need at least 4 theta cells");
}

// Dense R = sum_i rho_i phi_i phi_i^T M.
Eigen::MatrixXd mode_rate_matrix(const ThetaMesh& mesh, const DiscreteModes& modes,
                                 const std::vector<double>& rho) {
  const int N = mesh.nodes();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    Eigen::Map<const Eigen::VectorXd> phi(modes.vectors[i].data(), N);
    Eigen::VectorXd mphi = phi;
    for (int k = 0; k < N; ++k) mphi[k] *= mesh.mass[k];
    R.noalias() += rho[i] * phi * mphi.transpose();
  }
  return R;
}

struct Roots {
  double minus, plus;  // real parts when complex
  bool real;
};

Roots roots(double sigma, double gamma, double lambda) {
  const double D = sigma * sigma + 4.0 * (gamma + lambda);
  if (D > 0.0) {
    const double s = std::sqrt(D);
    return {(-sigma - s) / 2.0, (-sigma + s) / 2.0, true};
  }
  return {-sigma / 2.0, -sigma / 2.0, false};
}

// Right-end rates for w: rho_i^- for i >= 2, the slower root for mode 1.
// With a free mode-1 ghost the mode-1 rate is irrelevant to the bordered
// system; zero keeps the unbordered block clear of the translation mode.
std::vector<double> right_rates(const DiscreteModes& modes, const DerivedConstants& c,
                                bool mode1_free = false) {
  std::vector<double> rho(modes.lambda.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const Roots r = roots(c.sigma, c.gamma, modes.lambda[i]);
    rho[i] = i == 0 ? r.plus : r.minus;
  }
  if (mode1_free) rho[0] = 0.0;
  return rho;
}

// Left-end rates for v near zero: the growing root of every Neumann mode.
std::vector<double> left_rates(const DiscreteModes& modes, const DerivedConstants& c) {
  std::vector<double> rho(modes.lambda.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = roots(c.sigma, c.gamma, modes.lambda[i]).plus;
  return rho;
}

struct Setup {
  ProblemParams params;
  DerivedConstants constants;
  ThetaMesh mesh;
  std::vector<double> V;
  std::vector<double> t;
  double h;
};

Setup make_setup(const ProblemParams& params, const CylinderOptions& opt) {
  validate(params);
  Setup s;
  s.params = params;
  s.constants = derive(params);
  const auto& g = opt.grid;
  if (g.t_steps < 4) fail_validation("cylinder.bad_grid", "need at least 4 t steps");
  if (!(g.horizon > 0.0)) fail_validation("cylinder.bad_grid", "horizon must be positive");
  if (!(s.constants.gamma > 0.0))
    fail_validation("cylinder.no_singular_profile", "gamma <= 0: no positive stationary profile");
  if (!(s.constants.sigma * g.horizon >= opt.min_sigma_T)) {
    std::ostringstream os;
    os << "sigma T = " << s.constants.sigma * g.horizon << " is below " << opt.min_sigma_T;
    fail_validation("cylinder.horizon_too_short", os.str());
  }
  s.mesh = make_theta_mesh(params.n, params.a, g.theta_cells);
  s.V = discrete_singular_profile(s.mesh, params.q, s.constants.gamma);
  s.h = g.horizon / g.t_steps;
  s.t.resize(g.t_steps + 1);
  for (int j = 0; j <= g.t_steps; ++j) s.t[j] = g.t_begin + j * s.h;
  return s;
}

std::vector<double> resolve_left_data(const Setup& s, const CylinderOptions& opt) {
  const int N = s.mesh.nodes();
  std::vector<double> left = opt.left_data;
  if (left.empty()) {
    left = s.V;
    for (double& x : left) x *= opt.left_factor;
  }
  if (static_cast<int>(left.size()) != N)
    fail_validation("cylinder.grid_mismatch", "left data does not match the theta mesh");
  for (int k = 0; k < N; ++k) {
    if (!(left[k] > 0.0)) {
      std::ostringstream os;
      os << "left data is not positive at theta = " << s.mesh.theta[k];
      fail_validation("cylinder.nonpositive_data", os.str());
    }
    if (left[k] > s.V[k] * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "left data exceeds V at theta = " << s.mesh.theta[k];
      fail_validation("cylinder.unordered_data", os.str());
    }
  }
  return left;
}

class NonlinearSystem {
 public:
  NonlinearSystem(const Setup& s, const CylinderOptions& opt) : s_(s), opt_(opt) {
    N_ = s.mesh.nodes();
    L_ = static_cast<int>(s.t.size()) - 1;
    const auto& c = s.constants;
    if (opt.left == LeftCondition::Data) {
      left_ = resolve_left_data(s, opt);
    } else {
      if (opt.right != RightCondition::Asymptotic)
        fail_validation("cylinder.incompatible_conditions",
                        "a regular origin needs the asymptotic right condition");
      if (!(opt.origin_level > 0.0 && opt.origin_level < 1.0))
        fail_validation("cylinder.bad_origin_level", "origin_level must lie in (0, 1)");
      const DiscreteModes neumann = discrete_modes(s.mesh, 0.0);
      R0_ = mode_rate_matrix(s.mesh, neumann, left_rates(neumann, c));
      for (int k = 0; k < N_; ++k) mean_V_ += s.mesh.mass[k] * s.V[k];
    }
    if (opt.right == RightCondition::Asymptotic) {
      const double beta = s.params.q * std::pow(s.V.back(), s.params.q - 1.0);
      const DiscreteModes robin = discrete_modes(s.mesh, beta);
      R_ = mode_rate_matrix(s.mesh, robin, right_rates(robin, c, bordered()));
      phi1_ = robin.vectors[0];
    }
  }

  int nodes() const { return N_; }
  int levels() const { return L_ + 1; }
  const std::vector<double>& left_data() const { return left_; }
  bool bordered() const { return opt_.left == LeftCondition::RegularOrigin; }

  std::vector<double> initial_guess() const {
    std::vector<double> x(static_cast<std::size_t>(N_) * (L_ + 1));
    const double T = s_.t.back() - s_.t.front();
    for (int j = 0; j <= L_; ++j) {
      const double tau = s_.t[j] - s_.t.front();
      for (int k = 0; k < N_; ++k) {
        double v;
        if (opt_.left == LeftCondition::Data) {
          const double f = 1.0 - tau / T;
          v = s_.V[k] + (left_[k] - s_.V[k]) * f;
        } else {
          const double d = opt_.origin_level;
          const double e = std::exp(s_.constants.m_q * tau);
          v = s_.V[k] * d * e / (1.0 - d + d * e);
        }
        x[idx(j, k, N_)] = v;
      }
    }
    return x;
  }

  double flux(double v) const { return std::pow(std::abs(v), s_.params.q - 1.0) * v; }
  double dflux(double v) const { return s_.params.q * std::pow(std::abs(v), s_.params.q - 1.0); }

  // S(v)_k scaled by h^2 / M_k.
  void spatial(const double* v, std::vector<double>& out) const {
    const auto& m = s_.mesh;
    const double h2 = s_.h * s_.h;
    std::fill(out.begin(), out.end(), 0.0);
    for (int k = 0; k < m.cells; ++k) {
      const double f = m.face[k] * (v[k + 1] - v[k]);
      out[k] += f;
      out[k + 1] -= f;
    }
    out[N_ - 1] += flux(v[N_ - 1]);
    for (int k = 0; k < N_; ++k) out[k] = h2 * (out[k] / m.mass[k] - s_.constants.gamma * v[k]);
  }

  // Residual of every row, plus the pinning row when bordered.
  std::vector<double> residual(const std::vector<double>& x, double ghost, double& pin) const {
    const double h = s_.h, sig = s_.constants.sigma;
    std::vector<double> F(x.size());
    std::vector<double> S(N_);
    for (int j = 0; j <= L_; ++j) {
      const double* v = &x[idx(j, 0, N_)];
      double* r = &F[idx(j, 0, N_)];
      if (j == 0 && opt_.left == LeftCondition::Data) {
        for (int k = 0; k < N_; ++k) r[k] = v[k] - left_[k];
        continue;
      }
      if (j == L_ && opt_.right == RightCondition::Dirichlet) {
        for (int k = 0; k < N_; ++k) r[k] = v[k] - s_.V[k];
        continue;
      }
      spatial(v, S);
      if (j == 0) {
        Eigen::Map<const Eigen::VectorXd> v0(v, N_);
        const Eigen::VectorXd Rv = R0_ * v0;
        const double* v1 = &x[idx(1, 0, N_)];
        for (int k = 0; k < N_; ++k) r[k] = 2.0 * v1[k] - 2.0 * v[k] + (sig * h * h - 2.0 * h) * Rv[k] + S[k];
      } else if (j == L_) {
        Eigen::VectorXd w(N_);
        for (int k = 0; k < N_; ++k) w[k] = s_.V[k] - v[k];
        const Eigen::VectorXd Rw = R_ * w;
        const double* vm = &x[idx(L_ - 1, 0, N_)];
        for (int k = 0; k < N_; ++k)
          r[k] = 2.0 * vm[k] - 2.0 * v[k] - (2.0 * h + sig * h * h) * Rw[k] -
                 (1.0 + 0.5 * sig * h) * ghost * phi1_[k] + S[k];
      } else {
        const double* vm = &x[idx(j - 1, 0, N_)];
        const double* vp = &x[idx(j + 1, 0, N_)];
        for (int k = 0; k < N_; ++k)
          r[k] = vp[k] - 2.0 * v[k] + vm[k] + 0.5 * sig * h * (vp[k] - vm[k]) + S[k];
      }
    }
    pin = 0.0;
    if (bordered()) {
      double mean = 0.0;
      for (int k = 0; k < N_; ++k) mean += s_.mesh.mass[k] * x[idx(0, k, N_)];
      pin = mean / mean_V_ - opt_.origin_level;
    }
    return F;
  }

  void jacobian(const std::vector<double>& x, BandedMatrix& J) const {
    const auto& m = s_.mesh;
    const double h = s_.h, h2 = h * h, sig = s_.constants.sigma, gam = s_.constants.gamma;
    J.set_zero();
    auto spatial_block = [&](int j) {
      const int base = j * N_;
      for (int k = 0; k < N_; ++k) {
        const double sc = h2 / m.mass[k];
        double diag = 0.0;
        if (k > 0) {
          diag -= m.face[k - 1];
          J.add(base + k, base + k - 1, sc * m.face[k - 1]);
        }
        if (k < m.cells) {
          diag -= m.face[k];
          J.add(base + k, base + k + 1, sc * m.face[k]);
        }
        if (k == N_ - 1) diag += dflux(x[idx(j, k, N_)]);
        J.add(base + k, base + k, sc * diag - h2 * gam);
      }
    };
    for (int j = 0; j <= L_; ++j) {
      const int base = j * N_;
      if ((j == 0 && opt_.left == LeftCondition::Data) ||
          (j == L_ && opt_.right == RightCondition::Dirichlet)) {
        for (int k = 0; k < N_; ++k) J.add(base + k, base + k, 1.0);
        continue;
      }
      spatial_block(j);
      if (j == 0) {
        for (int k = 0; k < N_; ++k) {
          J.add(base + k, base + N_ + k, 2.0);
          J.add(base + k, base + k, -2.0);
          for (int kk = 0; kk < N_; ++kk) J.add(base + k, base + kk, (sig * h2 - 2.0 * h) * R0_(k, kk));
        }
      } else if (j == L_) {
        for (int k = 0; k < N_; ++k) {
          J.add(base + k, base - N_ + k, 2.0);
          J.add(base + k, base + k, -2.0);
          for (int kk = 0; kk < N_; ++kk) J.add(base + k, base + kk, (2.0 * h + sig * h2) * R_(k, kk));
        }
      } else {
        for (int k = 0; k < N_; ++k) {
          J.add(base + k, base - N_ + k, 1.0 - 0.5 * sig * h);
          J.add(base + k, base + N_ + k, 1.0 + 0.5 * sig * h);
          J.add(base + k, base + k, -2.0);
        }
      }
    }
  }

  // Column of d F / d ghost and row of d pin / d x.
  std::vector<double> ghost_column() const {
    std::vector<double> c(static_cast<std::size_t>(N_) * (L_ + 1), 0.0);
    const double f = -(1.0 + 0.5 * s_.constants.sigma * s_.h);
    for (int k = 0; k < N_; ++k) c[idx(L_, k, N_)] = f * phi1_[k];
    return c;
  }
  std::vector<double> pin_row() const {
    std::vector<double> r(static_cast<std::size_t>(N_) * (L_ + 1), 0.0);
    for (int k = 0; k < N_; ++k) r[idx(0, k, N_)] = s_.mesh.mass[k] / mean_V_;
    return r;
  }

 private:
  const Setup& s_;
  const CylinderOptions& opt_;
  int N_ = 0, L_ = 0;
  std::vector<double> left_;
  Eigen::MatrixXd R0_, R_;
  std::vector<double> phi1_;
  double mean_V_ = 0.0;
};

double max_abs(const std::vector<double>& v, double extra = 0.0) {
  double m = std::abs(extra);
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CylinderField make_field(const Setup& s, const CylinderOptions& opt) {
  CylinderField f;
  f.params = s.params;
  f.constants = s.constants;
  f.options = opt;
  f.mesh = s.mesh;
  f.t = s.t;
  f.singular = s.V;
  return f;
}

}  // namespace

ThetaMesh make_theta_mesh(int n, double a, int cells) {
  check_mesh_args(n, a, cells);
  ThetaMesh m;
  m.n = n;
  m.a = a;
  m.cells = cells;
  const int N = cells + 1;
  const double p0 = n <= 4 ? 2.0 : 1.0, p1 = 3.0;
  m.u.resize(N);
  m.one_minus_u.resize(N);
  m.theta.resize(N);
  for (int k = 0; k < N; ++k) {
    const double s = static_cast<double>(k) / cells;
    if (k == 0) {
      m.u[k] = 0.0;
      m.one_minus_u[k] = 1.0;
    } else if (k == cells) {
      m.u[k] = 1.0;
      m.one_minus_u[k] = 0.0;
    } else {
      m.u[k] = boost::math::ibeta(p0, p1, s);
      m.one_minus_u[k] = boost::math::ibeta(p1, p0, 1.0 - s);
    }
    m.theta[k] = m.u[k] < 0.5 ? std::asin(std::sqrt(m.u[k])) : std::acos(std::sqrt(m.one_minus_u[k]));
  }
  const MassFunction mf(n, a);
  m.mass.resize(N);
  for (int k = 0; k < N; ++k) {
    const double ulo = k == 0 ? 0.0 : 0.5 * (m.u[k - 1] + m.u[k]);
    const double tlo = k == 0 ? 1.0 : 0.5 * (m.one_minus_u[k - 1] + m.one_minus_u[k]);
    const double uhi = k == cells ? 1.0 : 0.5 * (m.u[k] + m.u[k + 1]);
    const double thi = k == cells ? 0.0 : 0.5 * (m.one_minus_u[k] + m.one_minus_u[k + 1]);
    m.mass[k] = 0.5 * (ulo + uhi) < 0.5 ? mf.head(uhi, thi) - mf.head(ulo, tlo)
                                         : mf.tail(ulo, tlo) - mf.tail(uhi, thi);
  }
  // P = P0 P1 with P0 = 2 u^{(n-1)/2}, P1 = (1-u)^{(a+1)/2}. For regular
  // profiles P1 y' is smooth at both ends, so the face flux is P0 at the
  // face times the difference quotient against the exact integral of 1/P1.
  const double e = (1.0 - a) / 2.0;
  m.face.resize(cells);
  for (int k = 0; k < cells; ++k) {
    const double tl = m.one_minus_u[k], tr = m.one_minus_u[k + 1];
    const double integral = tr > 0.0 ? std::pow(tr, e) * std::expm1(e * std::log(tl / tr)) / e
                                     : std::pow(tl, e) / e;
    const double uf = 0.5 * (m.u[k] + m.u[k + 1]);
    m.face[k] = 2.0 * std::pow(uf, (n - 1) / 2.0) / integral;
  }
  return m;
}

double dirichlet_form(const ThetaMesh& mesh, const std::vector<double>& y) {
  double s = 0.0;
  for (int k = 0; k < mesh.cells; ++k) {
    const double d = y[k + 1] - y[k];
    s += mesh.face[k] * d * d;
  }
  return s;
}

double mass_norm2(const ThetaMesh& mesh, const std::vector<double>& y) {
  double s = 0.0;
  for (int k = 0; k < mesh.nodes(); ++k) s += mesh.mass[k] * y[k] * y[k];
  return s;
}

std::vector<double> discrete_singular_profile(const ThetaMesh& mesh, double q, double gamma) {
  if (!(gamma > 0.0)) fail_validation("cylinder.no_singular_profile", "gamma must be positive");
  const int N = mesh.nodes();
  std::vector<double> dl(N - 1), d(N), du(N - 1), y(N, 0.0);
  for (int k = 0; k < N; ++k) d[k] = gamma * mesh.mass[k];
  for (int k = 0; k < mesh.cells; ++k) {
    d[k] += mesh.face[k];
    d[k + 1] += mesh.face[k];
    dl[k] = du[k] = -mesh.face[k];
  }
  y[N - 1] = 1.0;
  if (LAPACKE_dgtsv(LAPACK_COL_MAJOR, N, 1, dl.data(), d.data(), du.data(), y.data(), N) != 0)
    fail_numerical("cylinder.singular_system", "stationary profile system is singular");
  if (!(y[N - 1] > 0.0)) fail_numerical("cylinder.inconsistent_profile", "non-positive boundary value");
  const double c = std::pow(y[N - 1], -q / (q - 1.0));
  for (double& x : y) x *= c;
  return y;
}

DiscreteModes discrete_modes(const ThetaMesh& mesh, double beta) {
  const int N = mesh.nodes();
  Eigen::VectorXd diag(N), sub(N - 1), isq(N);
  for (int k = 0; k < N; ++k) isq[k] = 1.0 / std::sqrt(mesh.mass[k]);
  diag.setZero();
  for (int k = 0; k < mesh.cells; ++k) {
    diag[k] += mesh.face[k];
    diag[k + 1] += mesh.face[k];
    sub[k] = -mesh.face[k] * isq[k] * isq[k + 1];
  }
  diag[N - 1] -= beta;
  for (int k = 0; k < N; ++k) diag[k] *= isq[k] * isq[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) fail_numerical("cylinder.eigen_failed", "tridiagonal eigensolver failed");
  DiscreteModes out;
  out.lambda.resize(N);
  out.vectors.assign(N, std::vector<double>(N));
  for (int i = 0; i < N; ++i) {
    out.lambda[i] = es.eigenvalues()[i];
    const double sign = es.eigenvectors()(0, i) < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < N; ++k) out.vectors[i][k] = sign * es.eigenvectors()(k, i) * isq[k];
  }
  return out;
}

const char* to_string(LeftCondition c) {
  return c == LeftCondition::Data ? "data" : "regular_origin";
}

const char* to_string(RightCondition c) {
  return c == RightCondition::Dirichlet ? "dirichlet" : "asymptotic";
}

std::vector<double> CylinderField::slice(int j) const {
  const auto b = values.begin() + static_cast<std::ptrdiff_t>(j) * nodes();
  return {b, b + nodes()};
}

std::vector<double> CylinderField::w_slice(int j) const {
  std::vector<double> s = slice(j);
  if (!linear)
    for (int k = 0; k < nodes(); ++k) s[k] = singular[k] - s[k];
  return s;
}

std::vector<double> CylinderField::boundary_trace() const {
  std::vector<double> b(levels());
  for (int j = 0; j < levels(); ++j) b[j] = at(j, nodes() - 1);
  return b;
}

// Bordered Newton matrix as one band matrix. Every level carries a copy g_j
// of the free mode-1 ghost, tied to its neighbour by g_j = g_{j-1}; level 0
// carries the pinning row instead. The unbordered block alone is nearly
// singular along the translation mode, so it is never factored by itself.
int augmented_index(int i, int N) { return i / N * (N + 1) + i % N; }

void assemble_augmented(const BandedMatrix& J, const std::vector<double>& gcol,
                        const std::vector<double>& prow, int N, BandedMatrix& A) {
  const int n = J.size(), levels = n / N;
  A.set_zero();
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - J.lower()); j <= std::min(n - 1, i + J.upper()); ++j) {
      const double v = J.get(i, j);
      if (v != 0.0) A.add(augmented_index(i, N), augmented_index(j, N), v);
    }
  const int last = (levels - 1) * (N + 1) + N;
  for (int i = (levels - 1) * N; i < n; ++i) A.add(augmented_index(i, N), last, gcol[i]);
  for (int k = 0; k < N; ++k) A.add(N, k, prow[k]);
  for (int j = 1; j < levels; ++j) {
    const int r = j * (N + 1) + N;
    A.add(r, r, 1.0);
    A.add(r, r - (N + 1), -1.0);
  }
}

CylinderField solve_nonlinear(const ProblemParams& params, const CylinderOptions& opt) {
  const Setup s = make_setup(params, opt);
  NonlinearSystem sys(s, opt);
  const int N = sys.nodes(), n = N * sys.levels();
  std::vector<double> x = sys.initial_guess();
  if (opt.left == LeftCondition::Data) {
    // Start from the linearized solution. With oscillatory first modes the
    // finite-window problem can have further solutions far from V, and the
    // straight blend can be drawn to one of them.
    std::vector<double> w0(N);
    for (int k = 0; k < N; ++k) w0[k] = s.V[k] - sys.left_data()[k];
    const CylinderField lin = solve_linearized(params, w0, opt);
    std::vector<double> y(x.size());
    bool positive = true;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = s.V[i % N] - lin.values[i];
      positive = positive && y[i] > 0.0;
    }
    if (positive) x.swap(y);
  }
  double ghost = 0.0, pin = 0.0;
  std::vector<double> F = sys.residual(x, ghost, pin);
  double norm = max_abs(F, pin);
  BandedMatrix J(n, N, N);
  BandedMatrix A = sys.bordered() ? BandedMatrix(n + sys.levels(), N + 1, N + 1) : BandedMatrix(1, 0, 0);
  const std::vector<double> gcol = sys.bordered() ? sys.ghost_column() : std::vector<double>{};
  const std::vector<double> prow = sys.bordered() ? sys.pin_row() : std::vector<double>{};
  std::vector<int> damping;
  int it = 0;
  for (; norm > opt.tolerance; ++it) {
    if (it >= opt.max_iterations) {
      std::ostringstream os;
      os << "no convergence after " << it << " Newton steps, residual " << norm << ", halvings";
      for (int d : damping) os << ' ' << d;
      fail_numerical("cylinder.newton_failed", os.str());
    }
    sys.jacobian(x, J);
    std::vector<double> dx(F.size());
    double dg = 0.0;
    if (sys.bordered()) {
      assemble_augmented(J, gcol, prow, N, A);
      A.factor();
      std::vector<double> rhs(A.size(), 0.0);
      for (std::size_t i = 0; i < F.size(); ++i) rhs[augmented_index(static_cast<int>(i), N)] = -F[i];
      rhs[N] = -pin;
      A.solve(rhs);
      for (std::size_t i = 0; i < F.size(); ++i) dx[i] = rhs[augmented_index(static_cast<int>(i), N)];
      dg = rhs[N];
    } else {
      J.factor();
      for (std::size_t i = 0; i < F.size(); ++i) dx[i] = -F[i];
      J.solve(dx);
    }
    double lam = 1.0;
    int halvings = 0;
    bool accepted = false, positivity = false;
    std::size_t bad = 0;
    for (; halvings <= opt.max_halvings; ++halvings, lam *= 0.5) {
      std::vector<double> xt(x.size());
      bool positive = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        xt[i] = x[i] + lam * dx[i];
        if (!(xt[i] > 0.0) && positive) {
          positive = false;
          bad = i;
        }
      }
      if (!positive) {
        positivity = true;
        continue;
      }
      positivity = false;
      const double gt = ghost + lam * dg;
      double pt = 0.0;
      std::vector<double> Ft = sys.residual(xt, gt, pt);
      const double nt = max_abs(Ft, pt);
      if (nt < norm) {
        x.swap(xt);
        F.swap(Ft);
        ghost = gt;
        pin = pt;
        norm = nt;
        accepted = true;
        break;
      }
    }
    damping.push_back(halvings);
    if (!accepted) {
      std::ostringstream os;
      if (positivity) {
        os << "iterate lost positivity at t = " << s.t[bad / N] << ", theta = " << s.mesh.theta[bad % N];
        fail_numerical("cylinder.positivity_lost", os.str());
      }
      os << "damping exhausted at Newton step " << it << ", residual " << norm << ", halvings";
      for (int d : damping) os << ' ' << d;
      fail_numerical("cylinder.newton_failed", os.str());
    }
  }
  CylinderField f = make_field(s, opt);
  f.values = std::move(x);
  f.iterations = it;
  f.residual = norm;
  f.damping = std::move(damping);
  f.mode1_ghost = ghost;
  return f;
}

namespace {

void check_linear(const Setup& s, const std::vector<double>& left_w, const CylinderOptions& opt) {
  if (opt.left != LeftCondition::Data)
    fail_validation("cylinder.linear_left_condition", "the linear problem needs left data");
  if (static_cast<int>(left_w.size()) != s.mesh.nodes())
    fail_validation("cylinder.grid_mismatch", "left data does not match the theta mesh");
}

}  // namespace

CylinderField solve_linearized(const ProblemParams& params, const std::vector<double>& left_w,
                               const CylinderOptions& opt) {
  const Setup s = make_setup(params, opt);
  check_linear(s, left_w, opt);
  const int N = s.mesh.nodes(), L = static_cast<int>(s.t.size()) - 1;
  const double h = s.h, sig = s.constants.sigma, gam = s.constants.gamma;
  const double beta = params.q * std::pow(s.V.back(), params.q - 1.0);
  const DiscreteModes modes = discrete_modes(s.mesh, beta);
  const std::vector<double> rho = right_rates(modes, s.constants);
  CylinderField f = make_field(s, opt);
  f.linear = true;
  f.values.assign(static_cast<std::size_t>(N) * (L + 1), 0.0);
  std::vector<double> dl(L), d(L + 1), du(L), c(L + 1);
  for (int i = 0; i < N; ++i) {
    const auto& phi = modes.vectors[i];
    double c0 = 0.0;
    for (int k = 0; k < N; ++k) c0 += s.mesh.mass[k] * phi[k] * left_w[k];
    std::fill(c.begin(), c.end(), 0.0);
    c[0] = c0;
    d[0] = 1.0;
    du[0] = 0.0;
    for (int j = 1; j < L; ++j) {
      dl[j - 1] = 1.0 - 0.5 * sig * h;
      d[j] = -2.0 - h * h * (gam + modes.lambda[i]);
      du[j] = 1.0 + 0.5 * sig * h;
    }
    if (opt.right == RightCondition::Dirichlet) {
      dl[L - 1] = 0.0;
      d[L] = 1.0;
    } else {
      dl[L - 1] = 2.0;
      d[L] = -2.0 + (2.0 * h + sig * h * h) * rho[i] - h * h * (gam + modes.lambda[i]);
    }
    if (LAPACKE_dgtsv(LAPACK_COL_MAJOR, L + 1, 1, dl.data(), d.data(), du.data(), c.data(), L + 1) != 0)
      fail_numerical("cylinder.singular_system", "modal tridiagonal system is singular");
    for (int j = 0; j <= L; ++j)
      for (int k = 0; k < N; ++k) f.values[idx(j, k, N)] += c[j] * phi[k];
  }
  return f;
}

CylinderField solve_linearized_banded(const ProblemParams& params, const std::vector<double>& left_w,
                                      const CylinderOptions& opt) {
  const Setup s = make_setup(params, opt);
  check_linear(s, left_w, opt);
  const auto& m = s.mesh;
  const int N = m.nodes(), L = static_cast<int>(s.t.size()) - 1, n = N * (L + 1);
  const double h = s.h, h2 = h * h, sig = s.constants.sigma, gam = s.constants.gamma;
  const double beta = params.q * std::pow(s.V.back(), params.q - 1.0);
  Eigen::MatrixXd R;
  if (opt.right == RightCondition::Asymptotic) {
    const DiscreteModes modes = discrete_modes(m, beta);
    R = mode_rate_matrix(m, modes, right_rates(modes, s.constants));
  }
  BandedMatrix J(n, N, N);
  std::vector<double> rhs(n, 0.0);
  for (int j = 0; j <= L; ++j) {
    const int base = j * N;
    if (j == 0 || (j == L && opt.right == RightCondition::Dirichlet)) {
      for (int k = 0; k < N; ++k) {
        J.add(base + k, base + k, 1.0);
        rhs[base + k] = j == 0 ? left_w[k] : 0.0;
      }
      continue;
    }
    for (int k = 0; k < N; ++k) {
      const double sc = h2 / m.mass[k];
      double diag = 0.0;
      if (k > 0) {
        diag -= m.face[k - 1];
        J.add(base + k, base + k - 1, sc * m.face[k - 1]);
      }
      if (k < m.cells) {
        diag -= m.face[k];
        J.add(base + k, base + k + 1, sc * m.face[k]);
      }
      if (k == N - 1) diag += beta;
      J.add(base + k, base + k, sc * diag - h2 * gam);
      if (j == L) {
        J.add(base + k, base - N + k, 2.0);
        J.add(base + k, base + k, -2.0);
        for (int kk = 0; kk < N; ++kk) J.add(base + k, base + kk, (2.0 * h + sig * h2) * R(k, kk));
      } else {
        J.add(base + k, base - N + k, 1.0 - 0.5 * sig * h);
        J.add(base + k, base + N + k, 1.0 + 0.5 * sig * h);
        J.add(base + k, base + k, -2.0);
      }
    }
  }
  J.factor();
  J.solve(rhs);
  CylinderField f = make_field(s, opt);
  f.linear = true;
  f.values = std::move(rhs);
  return f;
}

std::vector<ModalTrajectory> project_modes(const CylinderField& field,
                                           const std::vector<AngularProfile>& profiles) {
  const int N = field.nodes();
  std::vector<ModalTrajectory> out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    std::vector<double> e(N);
    for (int k = 0; k < N; ++k) e[k] = field.mesh.mass[k] * profiles[i].value(field.mesh.theta[k]);
    ModalTrajectory tr;
    tr.index = static_cast<int>(i) + 1;
    tr.t = field.t;
    tr.z.resize(field.levels());
    for (int j = 0; j < field.levels(); ++j) tr.z[j] = dot(field.w_slice(j), e);
    out.push_back(std::move(tr));
  }
  return out;
}

std::vector<ModalTrajectory> project_modes(const CylinderField& field, const DiscreteModes& modes,
                                           int count) {
  const int N = field.nodes();
  if (static_cast<int>(modes.vectors.size()) != N || count > N)
    fail_validation("cylinder.grid_mismatch", "discrete modes do not match the theta mesh");
  std::vector<ModalTrajectory> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> e(N);
    for (int k = 0; k < N; ++k) e[k] = field.mesh.mass[k] * modes.vectors[i][k];
    ModalTrajectory tr;
    tr.index = i + 1;
    tr.t = field.t;
    tr.z.resize(field.levels());
    for (int j = 0; j < field.levels(); ++j) tr.z[j] = dot(field.w_slice(j), e);
    out.push_back(std::move(tr));
  }
  return out;
}

EnergyTrace energy_trace(const CylinderField& field) {
  if (field.linear) fail_validation("cylinder.linear_field", "energy is defined for the nonlinear field");
  const int N = field.nodes(), L = field.levels() - 1;
  if (L < 5) fail_validation("cylinder.bad_grid", "too few t levels for the energy trace");
  const double h = field.step(), q = field.params.q;
  const double sig = field.constants.sigma, gam = field.constants.gamma;
  EnergyTrace e;
  std::vector<double> vt(N);
  for (int j = 1; j < L; ++j) {
    const auto vm = field.slice(j - 1), v = field.slice(j), vp = field.slice(j + 1);
    for (int k = 0; k < N; ++k) vt[k] = (vp[k] - vm[k]) / (2.0 * h);
    const double kin = mass_norm2(field.mesh, vt);
    const double vb = v[N - 1];
    e.t.push_back(field.t[j]);
    e.energy.push_back(0.5 * kin - 0.5 * gam * mass_norm2(field.mesh, v) -
                       0.5 * dirichlet_form(field.mesh, v) + std::pow(vb, q + 1.0) / (q + 1.0));
    e.dissipation.push_back(-sig * kin);
  }
  for (std::size_t i = 1; i + 1 < e.energy.size(); ++i) {
    e.t_residual.push_back(e.t[i]);
    e.residual.push_back((e.energy[i + 1] - e.energy[i - 1]) / (2.0 * h) - e.dissipation[i]);
  }
  return e;
}

PhysicalField to_physical(const CylinderField& field) {
  PhysicalField p;
  p.theta = field.mesh.theta;
  const double m = field.constants.m_q;
  const int N = field.nodes();
  p.r.resize(field.levels());
  p.u.resize(field.values.size());
  for (int j = 0; j < field.levels(); ++j) {
    p.r[j] = std::exp(field.t[j]);
    const double s = std::exp(-m * field.t[j]);
    for (int k = 0; k < N; ++k) p.u[idx(j, k, N)] = s * field.at(j, k);
  }
  return p;
}

PhysicalField scale_physical(const PhysicalField& u1, double m_q, int shift) {
  const int J = static_cast<int>(u1.r.size()), N = static_cast<int>(u1.theta.size());
  if (shift < 0 || shift >= J) fail_validation("cylinder.bad_shift", "shift must lie in [0, levels)");
  PhysicalField p;
  p.theta = u1.theta;
  const double beta = std::pow(u1.r[shift] / u1.r[0], m_q);
  for (int j = 0; j + shift < J; ++j) {
    p.r.push_back(u1.r[j]);
    for (int k = 0; k < N; ++k) p.u.push_back(beta * u1.u[idx(j + shift, k, N)]);
  }
  return p;
}

double scaling_beta(const CylinderField& field, int shift) {
  return std::exp(field.constants.m_q * shift * field.step());
}

double decay_bound(const PhysicalField& u, double m_q) {
  const std::size_t N = u.theta.size();
  double best = 0.0;
  for (std::size_t j = 0; j < u.r.size(); ++j) {
    const double f = std::pow(1.0 + u.r[j], m_q);
    for (std::size_t k = 0; k < N; ++k) best = std::max(best, u.u[j * N + k] * f);
  }
  return best;
}

void write_field_csv(const CylinderField& field, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "t,theta,v,w\n";
  const int N = field.nodes();
  for (int j = 0; j < field.levels(); ++j) {
    const auto w = field.w_slice(j);
    for (int k = 0; k < N; ++k) {
      const double v = field.linear ? std::nan("") : field.at(j, k);
      os << format_double(field.t[j]) << ',' << format_double(field.mesh.theta[k]) << ','
         << format_double(v) << ',' << format_double(w[k]) << '\n';
    }
  }
  write_atomic(path, os.str());
}

}  // namespace jlflux
