#include "jlflux/angular_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "jlflux/error.hpp"
#include "jlflux/io.hpp"

namespace jlflux {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr int kSeriesTerms = 400;

double end_window(double kappa) {
  const double k = std::abs(kappa);
  return k > 0.0 ? std::min(0.5, 6.0 / std::sqrt(k)) : 0.5;
}

struct Hermite {
  double y0, y1, m0, m1, h;
  double at(double t) const {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * m1;
  }
};

}  // namespace

double angular_weight(int n, double a, double theta, double phi) {
  return std::pow(std::sin(theta), n - 2) * std::pow(std::sin(phi), a);
}

struct AngularProfile::Core {
  int n;
  double a;
  double kappa;
  int steps;
  double h;
  int i_left, i_right;
  FrobeniusSeries left, right0, right1;
  double coef0, coef1;  // y = coef0 * right0 + coef1 * right1 near pi/2
  std::vector<double> y, dy, g;

  struct Local {
    double y, dy, g;
  };

  Local left_end(double theta) const {
    const auto v = left.eval(theta);
    return {v.y, v.dy, angular_weight(n, a, theta, kHalfPi - theta) * v.dy};
  }
  Local right_end(double phi) const {
    const auto v0 = right0.eval(phi);
    const auto v1 = right1.eval(phi);
    const double dtheta = -(coef0 * v0.dy + coef1 * v1.dy);
    return {coef0 * v0.y + coef1 * v1.y, dtheta,
            angular_weight(n, a, kHalfPi - phi, phi) * dtheta};
  }

  Local at(double theta) const {
    if (!(theta >= 0.0 && theta <= kHalfPi)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "theta = " << theta << " is outside [0, pi/2]";
      fail_validation("angular.theta_out_of_range", msg.str());
    }
    if (theta <= i_left * h) return left_end(theta);
    const double phi = kHalfPi - theta;
    if (phi <= (steps - i_right) * h) {
      if (phi == 0.0) return {y.back(), dy.back(), g.back()};
      return right_end(phi);
    }
    int k = std::clamp(static_cast<int>(theta / h), i_left, i_right - 1);
    const double t = (theta - k * h) / h;
    const double w = angular_weight(n, a, theta, phi);
    const Hermite hy{y[k], y[k + 1], dy[k], dy[k + 1], h};
    const double w0 = angular_weight(n, a, k * h, kHalfPi - k * h);
    const double w1 = angular_weight(n, a, (k + 1) * h, kHalfPi - (k + 1) * h);
    const Hermite hg{g[k], g[k + 1], kappa * w0 * y[k], kappa * w1 * y[k + 1], h};
    const double gv = hg.at(t);
    return {hy.at(t), gv / w, gv};
  }
};

int AngularProfile::n() const noexcept { return core_->n; }
double AngularProfile::a() const noexcept { return core_->a; }
double AngularProfile::kappa() const noexcept { return core_->kappa; }
int AngularProfile::steps() const noexcept { return core_->steps; }

double AngularProfile::value(double theta) const { return scale_ * core_->at(theta).y; }
double AngularProfile::derivative_at(double theta) const { return scale_ * core_->at(theta).dy; }
double AngularProfile::flux_variable_at(double theta) const {
  return scale_ * core_->at(theta).g;
}

AngularProfile AngularProfile::scaled(double c) const {
  AngularProfile p = *this;
  p.scale_ *= c;
  for (auto* v : {&p.values_, &p.derivative_, &p.flux_variable_})
    for (double& x : *v) x *= c;
  return p;
}

int AngularProfile::sign_changes() const {
  int count = 0;
  int last = 0;
  for (double v : values_) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

double AngularProfile::equation_residual(double margin) const {
  const Core& c = *core_;
  const double h = c.h;
  double worst = 0.0, size = 0.0;
  for (int k = 1; k < c.steps; ++k) {
    const double th = k * h;
    if (th > kHalfPi - margin) break;
    const double wm = angular_weight(c.n, c.a, th - 0.5 * h, kHalfPi - th + 0.5 * h);
    const double wp = angular_weight(c.n, c.a, th + 0.5 * h, kHalfPi - th - 0.5 * h);
    const double w = angular_weight(c.n, c.a, th, kHalfPi - th);
    const double lhs = (wp * (c.y[k + 1] - c.y[k]) - wm * (c.y[k] - c.y[k - 1])) / (h * h);
    worst = std::max(worst, std::abs(lhs - c.kappa * w * c.y[k]));
    size = std::max(size, std::abs(w * c.y[k]));
  }
  if (size == 0.0) return 0.0;
  return worst / (size * std::max(1.0, std::abs(c.kappa)));
}

AngularSolver::AngularSolver(int n, double a, AngularGrid grid)
    : n_(n), a_(a), steps_(grid.steps) {
  if (n < 3) fail_validation("angular.n_too_small", "n must be >= 3");
  if (!(a > -1.0 && a < 1.0) || a == 0.0)
    fail_validation("angular.a_out_of_range", "a must lie in (-1, 1) without 0");
  if (steps_ < 16) fail_validation("angular.grid_too_small", "need at least 16 steps");
  h_ = kHalfPi / steps_;
  w_node_.resize(steps_ + 1);
  w_half_.resize(steps_);
  for (int k = 0; k <= steps_; ++k)
    w_node_[k] = angular_weight(n, a, k * h_, (steps_ - k) * h_);
  for (int k = 0; k < steps_; ++k)
    w_half_[k] = angular_weight(n, a, (k + 0.5) * h_, (steps_ - k - 0.5) * h_);
  p_left_ = left_end_coefficients(n, a, kSeriesTerms);
  p_right_ = right_end_coefficients(n, a, kSeriesTerms);
}

AngularProfile AngularSolver::solve(double kappa) const {
  if (!std::isfinite(kappa)) fail_validation("angular.bad_kappa", "kappa must be finite");
  auto core = std::make_shared<AngularProfile::Core>();
  auto& c = *core;
  c.n = n_;
  c.a = a_;
  c.kappa = kappa;
  c.steps = steps_;
  c.h = h_;
  const int window = std::max(1, static_cast<int>(end_window(kappa) / h_));
  c.i_left = std::min(window, steps_ / 4);
  c.i_right = steps_ - c.i_left;
  const double theta_l = c.i_left * h_;
  const double phi_r = (steps_ - c.i_right) * h_;
  c.left = frobenius(p_left_, kappa, 0.0, 1.0, theta_l, kSeriesTerms);
  c.right0 = frobenius(p_right_, kappa, 0.0, 1.0, phi_r, kSeriesTerms);
  c.right1 = frobenius(p_right_, kappa, 1.0 - a_, -1.0 / (1.0 - a_), phi_r, kSeriesTerms);

  const int N = steps_;
  c.y.assign(N + 1, 0.0);
  c.dy.assign(N + 1, 0.0);
  c.g.assign(N + 1, 0.0);
  for (int k = 0; k <= c.i_left; ++k) {
    const auto v = c.left.eval(k * h_);
    c.y[k] = v.y;
    c.dy[k] = v.dy;
    c.g[k] = w_node_[k] * v.dy;
  }

  double y = c.y[c.i_left], g = c.g[c.i_left];
  const double hh = 0.5 * h_;
  for (int k = c.i_left; k < c.i_right; ++k) {
    const double w0 = w_node_[k], wm = w_half_[k], w1 = w_node_[k + 1];
    const double k1y = g / w0, k1g = kappa * w0 * y;
    const double y2 = y + hh * k1y, g2 = g + hh * k1g;
    const double k2y = g2 / wm, k2g = kappa * wm * y2;
    const double y3 = y + hh * k2y, g3 = g + hh * k2g;
    const double k3y = g3 / wm, k3g = kappa * wm * y3;
    const double y4 = y + h_ * k3y, g4 = g + h_ * k3g;
    const double k4y = g4 / w1, k4g = kappa * w1 * y4;
    y += h_ / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    g += h_ / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
    if (!std::isfinite(y) || !std::isfinite(g) || std::abs(y) > 1e290) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "solution overflowed at theta = " << (k + 1) * h_ << " for kappa = " << kappa;
      fail_numerical("angular.overflow", msg.str());
    }
    c.y[k + 1] = y;
    c.g[k + 1] = g;
    c.dy[k + 1] = g / w1;
  }

  // Match y = coef0 * right0 + coef1 * right1 in value and theta-derivative.
  const auto r0 = c.right0.eval(phi_r);
  const auto r1 = c.right1.eval(phi_r);
  const double yr = c.y[c.i_right], dyr = c.dy[c.i_right];
  // theta-derivatives of the basis are -d/dphi.
  const double m00 = r0.y, m01 = r1.y, m10 = -r0.dy, m11 = -r1.dy;
  const double det = m00 * m11 - m01 * m10;
  if (!(std::abs(det) > 0.0) || !std::isfinite(det))
    fail_numerical("angular.matching_failed", "endpoint basis is degenerate at the matching point");
  c.coef0 = (yr * m11 - m01 * dyr) / det;
  c.coef1 = (m00 * dyr - m10 * yr) / det;

  for (int k = c.i_right + 1; k < N; ++k) {
    const double phi = (N - k) * h_;
    const auto v0 = c.right0.eval(phi);
    const auto v1 = c.right1.eval(phi);
    c.y[k] = c.coef0 * v0.y + c.coef1 * v1.y;
    c.dy[k] = -(c.coef0 * v0.dy + c.coef1 * v1.dy);
    c.g[k] = w_node_[k] * c.dy[k];
  }
  c.y[N] = c.coef0;
  c.g[N] = c.coef1;
  if (c.coef1 == 0.0 || a_ < 0.0)
    c.dy[N] = 0.0;
  else
    c.dy[N] = std::copysign(std::numeric_limits<double>::infinity(), c.coef1);

  AngularProfile p;
  p.theta_.resize(N + 1);
  for (int k = 0; k <= N; ++k) p.theta_[k] = k * h_;
  p.theta_[N] = kHalfPi;
  p.values_ = c.y;
  p.derivative_ = c.dy;
  p.flux_variable_ = c.g;
  p.core_ = std::move(core);
  return p;
}

AngularProfile integrate_angular(double kappa, int n, double a, AngularGrid grid) {
  return AngularSolver(n, a, grid).solve(kappa);
}

AngularProfile singular_profile(const ProblemParams& params, const DerivedConstants& constants,
                                AngularGrid grid) {
  validate(params);
  if (!(constants.gamma > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "singular profile needs q > (n-1)/(n+a-2) = " << constants.q_sing
        << " so that gamma > 0 (got gamma = " << constants.gamma << ")";
    fail_validation("angular.q_below_singular_threshold", msg.str());
  }
  const AngularProfile y = integrate_angular(constants.gamma, params.n, params.a, grid);
  const double yb = y.boundary_value();
  const double flux = y.flux();
  if (!(yb > 0.0) || !(flux > 0.0))
    fail_numerical("angular.inconsistent_profile",
                   "shooting solution has non-positive boundary value or flux");
  const double c = std::exp((std::log(flux) - params.q * std::log(yb)) / (params.q - 1.0));
  return y.scaled(c);
}

void write_profile_csv(std::ostream& out, const AngularProfile& profile) {
  out << "theta,value,derivative,flux_variable\n";
  const auto th = profile.theta();
  for (std::size_t k = 0; k < th.size(); ++k) {
    out << format_double(th[k]) << ',' << format_double(profile.values()[k]) << ','
        << format_double(profile.derivative()[k]) << ','
        << format_double(profile.flux_variable()[k]) << '\n';
  }
}

}  // namespace jlflux
