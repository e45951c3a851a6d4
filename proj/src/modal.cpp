#include "jlflux/modal.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <sstream>

#include "jlflux/error.hpp"
#include "jlflux/quadrature.hpp"

namespace jlflux {

namespace {

using cplx = std::complex<double>;

constexpr int kPanelOrder = 8;

void check_grid(const TimeGrid& g) {
  if (!(g.horizon > 0.0) || g.steps < 2)
    fail_validation("modal.bad_grid", "need a positive horizon and at least 2 steps");
}

std::vector<double> grid_times(const TimeGrid& g) {
  std::vector<double> t(g.steps + 1);
  const double dt = g.horizon / g.steps;
  for (int j = 0; j <= g.steps; ++j) t[j] = j * dt;
  return t;
}

// Forcing sampled at the Gauss-Legendre points of every grid interval.
struct PanelSamples {
  double dt;
  std::vector<double> x, w;  // nodes and weights on [0, 1]
  std::vector<double> f;     // f[j * order + g]

  PanelSamples(const Forcing& forcing, const TimeGrid& grid) {
    dt = grid.horizon / grid.steps;
    const GaussRule gl = gauss_legendre(kPanelOrder);
    for (int g = 0; g < kPanelOrder; ++g) {
      x.push_back(0.5 * (1.0 + gl.nodes[g]));
      w.push_back(0.5 * gl.weights[g]);
    }
    f.resize(static_cast<std::size_t>(grid.steps) * kPanelOrder);
    for (int j = 0; j < grid.steps; ++j)
      for (int g = 0; g < kPanelOrder; ++g) f[j * kPanelOrder + g] = forcing((j + x[g]) * dt);
  }
  int intervals() const { return static_cast<int>(f.size()) / kPanelOrder; }
};

// P(t_j) = int_0^{t_j} e^{rho (t_j - s)} f(s) ds
std::vector<cplx> forward_convolution(cplx rho, const PanelSamples& ps) {
  const int m = ps.intervals();
  std::vector<cplx> out(m + 1, 0.0);
  std::vector<cplx> k(kPanelOrder);
  for (int g = 0; g < kPanelOrder; ++g) k[g] = ps.w[g] * ps.dt * std::exp(rho * ps.dt * (1.0 - ps.x[g]));
  const cplx step = std::exp(rho * ps.dt);
  for (int j = 0; j < m; ++j) {
    cplx acc = step * out[j];
    for (int g = 0; g < kPanelOrder; ++g) acc += k[g] * ps.f[j * kPanelOrder + g];
    out[j + 1] = acc;
  }
  return out;
}

// B(t_j) = int_0^{t_j} (t_j - s) e^{rho (t_j - s)} f(s) ds, A the plain convolution.
std::vector<double> forward_ramp_convolution(double rho, const PanelSamples& ps) {
  const int m = ps.intervals();
  const auto a = forward_convolution(rho, ps);
  std::vector<double> out(m + 1, 0.0);
  const double step = std::exp(rho * ps.dt);
  for (int j = 0; j < m; ++j) {
    double acc = step * (out[j] + ps.dt * a[j].real());
    for (int g = 0; g < kPanelOrder; ++g) {
      const double tau = ps.dt * (1.0 - ps.x[g]);
      acc += ps.w[g] * ps.dt * tau * std::exp(rho * tau) * ps.f[j * kPanelOrder + g];
    }
    out[j + 1] = acc;
  }
  return out;
}

// Q(t_j) = int_{t_j}^{T} e^{rho (t_j - s)} f(s) ds + tail, computed backward.
std::vector<double> backward_convolution(double rho, const PanelSamples& ps, double tail) {
  const int m = ps.intervals();
  std::vector<double> out(m + 1, 0.0);
  out[m] = tail;
  const double step = std::exp(-rho * ps.dt);
  for (int j = m - 1; j >= 0; --j) {
    double acc = step * out[j + 1];
    for (int g = 0; g < kPanelOrder; ++g)
      acc += ps.w[g] * ps.dt * std::exp(-rho * ps.x[g] * ps.dt) * ps.f[j * kPanelOrder + g];
    out[j] = acc;
  }
  return out;
}

// int_T^inf e^{rho (T - s)} f(s) ds with f ~ C e^{-mu s} fitted on the last
// tenth of the grid samples.
double exponential_tail(int mode, double rho, const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  const std::size_t first = n - std::max<std::size_t>(3, n / 10);
  bool all_zero = true;
  for (std::size_t j = first; j < n; ++j) all_zero = all_zero && f[j] == 0.0;
  if (all_zero) return 0.0;
  const double sign = f.back() > 0 ? 1.0 : -1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t j = first; j < n; ++j) {
    if (!(f[j] * sign > 0.0)) {
      std::ostringstream msg;
      msg << "forcing of mode " << mode << " changes sign in its tail; exponential tail undefined";
      fail_numerical("modal.divergent_tail", msg.str());
    }
    const double y = std::log(std::abs(f[j]));
    sx += t[j];
    sy += y;
    sxx += t[j] * t[j];
    sxy += t[j] * y;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double mu = -slope;
  if (!(mu + rho > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "tail integral of mode " << mode << " diverges: forcing decay rate " << mu
        << " does not exceed -rho^+ = " << -rho;
    fail_numerical("modal.divergent_tail", msg.str());
  }
  const double intercept = (sy - slope * sx) / count;
  const double f_end = sign * std::exp(intercept + slope * t.back());
  return f_end / (mu + rho);
}

std::vector<double> sample(const Forcing& f, const std::vector<double>& t) {
  std::vector<double> out(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) out[j] = f(t[j]);
  return out;
}

}  // namespace

Forcing sampled_forcing(double t0, double dt, std::vector<double> samples) {
  if (samples.size() < 4) fail_validation("modal.bad_samples", "need at least 4 forcing samples");
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      samples.begin(), samples.end(), t0, dt);
  const double t_end = t0 + dt * (samples.size() - 1);
  return [spline, t0, t_end](double t) { return (*spline)(std::clamp(t, t0, t_end)); };
}

double nonlinearity_g(double w, double v_b, double q) {
  if (!(v_b - w > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "need V_B - w > 0 (got V_B = " << v_b << ", w = " << w << ")";
    fail_validation("modal.domain", msg.str());
  }
  return std::pow(v_b, q) - std::pow(v_b - w, q) - q * std::pow(v_b, q - 1.0) * w;
}

ModalTrajectory duhamel_solution(int i, double lambda, double z0, double z0prime,
                                 const Forcing& forcing, const DerivedConstants& c, JLClass jl_class,
                                 TimeGrid grid) {
  check_grid(grid);
  if (i < 1) fail_validation("modal.bad_index", "mode index starts at 1");
  ModalTrajectory tr;
  tr.index = i;
  tr.t = grid_times(grid);
  tr.forcing = sample(forcing, tr.t);
  tr.z.resize(tr.t.size());
  const PanelSamples ps(forcing, grid);
  const double disc = c.sigma * c.sigma + 4.0 * (c.gamma + lambda);

  auto mismatch = [&](const char* what) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mode " << i << ": discriminant " << disc << " does not fit " << what;
    fail_validation("modal.class_mismatch", msg.str());
  };

  if (i >= 2) {
    if (!(disc > 0.0)) mismatch("the two-real-root form of higher modes");
    const double s = std::sqrt(disc);
    const double rm = 0.5 * (-c.sigma - s), rp = 0.5 * (-c.sigma + s);
    const double tail = exponential_tail(i, rp, tr.t, tr.forcing);
    const auto pm = forward_convolution(rm, ps);
    const auto qp = backward_convolution(rp, ps, tail);
    for (std::size_t j = 0; j < tr.t.size(); ++j) {
      const double em = std::exp(rm * tr.t[j]);
      tr.z[j] = z0 * em - (pm[j].real() + qp[j]) / s + em * qp[0] / s;
    }
    return tr;
  }

  switch (jl_class) {
    case JLClass::Supercritical: {
      if (!(disc > 0.0)) mismatch("the supercritical class");
      const double s = std::sqrt(disc);
      const double rm = 0.5 * (-c.sigma - s), rp = 0.5 * (-c.sigma + s);
      const auto pm = forward_convolution(rm, ps);
      const auto pp = forward_convolution(rp, ps);
      const double a = (z0prime - rm * z0) / s;
      for (std::size_t j = 0; j < tr.t.size(); ++j) {
        const double em = std::exp(rm * tr.t[j]), ep = std::exp(rp * tr.t[j]);
        tr.z[j] = z0 * em + a * (ep - em) + (pp[j].real() - pm[j].real()) / s;
      }
      break;
    }
    case JLClass::Critical: {
      const double r = -0.5 * c.sigma;
      const auto b = forward_ramp_convolution(r, ps);
      for (std::size_t j = 0; j < tr.t.size(); ++j) {
        const double e = std::exp(r * tr.t[j]);
        tr.z[j] = z0 * e + (z0prime - r * z0) * tr.t[j] * e + b[j];
      }
      break;
    }
    case JLClass::Subcritical: {
      if (!(disc < 0.0)) mismatch("the subcritical class");
      const double K = 0.5 * std::sqrt(-disc);
      const auto pc = forward_convolution(cplx(-0.5 * c.sigma, K), ps);
      for (std::size_t j = 0; j < tr.t.size(); ++j) {
        const double t = tr.t[j];
        const double e = std::exp(-0.5 * c.sigma * t);
        tr.z[j] = (0.5 * c.sigma * z0 + z0prime) / K * std::sin(K * t) * e +
                  z0 * std::cos(K * t) * e + pc[j].imag() / K;
      }
      break;
    }
  }
  return tr;
}

ModalTrajectory ode_direct(int i, double lambda, double z0, double z0prime, const Forcing& forcing,
                           const DerivedConstants& c, TimeGrid grid, double tol) {
  check_grid(grid);
  const double dt = grid.horizon / grid.steps;
  const double k = c.gamma + lambda;
  auto run = [&](int sub) {
    std::vector<double> z(grid.steps + 1);
    double y = z0, v = z0prime;
    z[0] = y;
    const double h = dt / sub;
    for (int j = 0; j < grid.steps; ++j) {
      for (int s = 0; s < sub; ++s) {
        const double t = j * dt + s * h;
        const double f0 = forcing(t), fm = forcing(t + 0.5 * h), f1 = forcing(t + h);
        auto acc = [&](double yy, double vv, double ff) { return ff - c.sigma * vv + k * yy; };
        const double k1y = v, k1v = acc(y, v, f0);
        const double k2y = v + 0.5 * h * k1v, k2v = acc(y + 0.5 * h * k1y, k2y, fm);
        const double k3y = v + 0.5 * h * k2v, k3v = acc(y + 0.5 * h * k2y, k3y, fm);
        const double k4y = v + h * k3v, k4v = acc(y + h * k3y, k4y, f1);
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
      }
      z[j + 1] = y;
    }
    return z;
  };
  std::vector<double> prev = run(1);
  for (int sub = 2; sub <= 4096; sub *= 2) {
    std::vector<double> next = run(sub);
    double diff = 0.0, size = 1.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      diff = std::max(diff, std::abs(next[j] - prev[j]));
      size = std::max(size, std::abs(next[j]));
    }
    if (diff <= tol * size) {
      ModalTrajectory tr;
      tr.index = i;
      tr.t = grid_times(grid);
      tr.z = std::move(next);
      tr.forcing = sample(forcing, tr.t);
      return tr;
    }
    prev = std::move(next);
  }
  fail_numerical("modal.no_convergence", "step halving did not reach the requested agreement");
}

double vbar_residual(const std::vector<double>& t, const std::vector<double>& vbar,
                     const std::vector<double>& v_b, const DerivedConstants& c, double q) {
  if (t.size() != vbar.size() || t.size() != v_b.size() || t.size() < 3)
    fail_validation("modal.grid_mismatch", "trajectories must share a grid of at least 3 nodes");
  const double dt = t[1] - t[0];
  for (std::size_t j = 1; j < t.size(); ++j)
    if (std::abs((t[j] - t[j - 1]) - dt) > 1e-9 * std::abs(dt))
      fail_validation("modal.grid_mismatch", "time grid is not uniform");
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < t.size(); ++j) {
    const double vtt = (vbar[j + 1] - 2 * vbar[j] + vbar[j - 1]) / (dt * dt);
    const double vt = (vbar[j + 1] - vbar[j - 1]) / (2 * dt);
    const double vq = std::copysign(std::pow(std::abs(v_b[j]), q), v_b[j]);
    worst = std::max(worst, std::abs(vtt + c.sigma * vt - c.gamma * vbar[j] + vq));
  }
  return worst;
}

const char* to_string(DecayModel m) {
  switch (m) {
    case DecayModel::PureExponential: return "PureExponential";
    case DecayModel::LinearTimesExponential: return "LinearTimesExponential";
    case DecayModel::OscillatoryExponential: return "OscillatoryExponential";
  }
  return "?";
}

namespace {

struct Window {
  std::size_t first, last;  // inclusive
};

Window window_of(const std::vector<double>& t, const std::vector<double>& z, const FitWindow& w) {
  if (t.size() != z.size()) fail_validation("modal.grid_mismatch", "time and value arrays differ in size");
  if (!(w.transient_fraction >= 0.0 && w.transient_fraction < w.end_fraction && w.end_fraction <= 1.0))
    fail_validation("modal.bad_window", "need 0 <= transient_fraction < end_fraction <= 1");
  const std::size_t m = t.size() - 1;
  Window win{static_cast<std::size_t>(std::ceil(w.transient_fraction * m)),
             static_cast<std::size_t>(std::floor(w.end_fraction * m))};
  if (win.last < win.first + 3) fail_validation("modal.bad_window", "fit window has fewer than 4 samples");
  return win;
}

void finish(DecayFit& fit, const std::vector<double>& t, const std::vector<double>& z, const Window& win,
            const FitWindow& w, const std::function<double(double)>& model) {
  fit.t_begin = t[win.first];
  fit.t_end = t[win.last];
  double size = 0.0;
  fit.residual = 0.0;
  for (std::size_t j = win.first; j <= win.last; ++j) {
    fit.residual = std::max(fit.residual, std::abs(z[j] - model(t[j])));
    size = std::max(size, std::abs(z[j]));
  }
  if (!(fit.residual <= w.residual_cap * size)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << to_string(fit.model) << " fit misfit " << fit.residual << " exceeds " << w.residual_cap
        << " x max|z| = " << w.residual_cap * size << " on [" << fit.t_begin << ", " << fit.t_end << "]";
    fail_numerical("modal.fit_failed", msg.str());
  }
}

// Least squares for y ~ c1 b1(t) + c2 b2(t).
std::pair<double, double> two_term_fit(const std::vector<double>& t, const std::vector<double>& y,
                                       const Window& win, const std::function<double(double)>& b1,
                                       const std::function<double(double)>& b2) {
  double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
  for (std::size_t j = win.first; j <= win.last; ++j) {
    const double u = b1(t[j]), v = b2(t[j]);
    a11 += u * u;
    a12 += u * v;
    a22 += v * v;
    r1 += u * y[j];
    r2 += v * y[j];
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-300)) fail_numerical("modal.fit_failed", "degenerate least-squares system");
  return {(r1 * a22 - r2 * a12) / det, (a11 * r2 - a12 * r1) / det};
}

}  // namespace

DecayFit fit_pure_exponential(const std::vector<double>& t, const std::vector<double>& z, FitWindow w) {
  const Window win = window_of(t, z, w);
  const double sign = z[win.first] > 0 ? 1.0 : -1.0;
  std::vector<double> logs(z.size(), 0.0);
  for (std::size_t j = win.first; j <= win.last; ++j) {
    if (!(z[j] * sign > 0.0))
      fail_numerical("modal.fit_failed", "trajectory changes sign inside the exponential fit window");
    logs[j] = std::log(std::abs(z[j]));
  }
  const auto [slope, intercept] =
      two_term_fit(t, logs, win, [](double x) { return x; }, [](double) { return 1.0; });
  if (!(slope < 0.0)) fail_numerical("modal.not_decaying", "fitted exponential rate is not negative");
  DecayFit fit;
  fit.model = DecayModel::PureExponential;
  fit.rate = slope;
  fit.xi1 = sign * std::exp(intercept);
  finish(fit, t, z, win, w, [&](double x) { return fit.xi1 * std::exp(fit.rate * x); });
  return fit;
}

DecayFit fit_linear_times_exponential(const std::vector<double>& t, const std::vector<double>& z,
                                      double sigma, FitWindow w) {
  const Window win = window_of(t, z, w);
  if (!(sigma > 0.0)) fail_numerical("modal.not_decaying", "envelope e^{-sigma t/2} needs sigma > 0");
  std::vector<double> y(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) y[j] = z[j] * std::exp(0.5 * sigma * t[j]);
  const auto [x1, x2] = two_term_fit(t, y, win, [](double x) { return x; }, [](double) { return 1.0; });
  DecayFit fit;
  fit.model = DecayModel::LinearTimesExponential;
  fit.rate = -0.5 * sigma;
  fit.xi1 = x1;
  fit.xi2 = x2;
  finish(fit, t, z, win, w, [&](double x) { return (x1 * x + x2) * std::exp(-0.5 * sigma * x); });
  return fit;
}

DecayFit fit_oscillatory(const std::vector<double>& t, const std::vector<double>& z, double sigma,
                         double K, FitWindow w) {
  const Window win = window_of(t, z, w);
  if (!(sigma > 0.0)) fail_numerical("modal.not_decaying", "envelope e^{-sigma t/2} needs sigma > 0");
  std::vector<double> y(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) y[j] = z[j] * std::exp(0.5 * sigma * t[j]);
  const auto [x1, x2] = two_term_fit(
      t, y, win, [K](double x) { return std::sin(K * x); }, [K](double x) { return std::cos(K * x); });
  DecayFit fit;
  fit.model = DecayModel::OscillatoryExponential;
  fit.rate = -0.5 * sigma;
  fit.frequency = K;
  fit.xi1 = x1;
  fit.xi2 = x2;
  finish(fit, t, z, win, w, [&](double x) {
    return (x1 * std::sin(K * x) + x2 * std::cos(K * x)) * std::exp(-0.5 * sigma * x);
  });
  return fit;
}

DecayFit fit_oscillatory_free(const std::vector<double>& t, const std::vector<double>& z, FitWindow w) {
  const Window win = window_of(t, z, w);
  const std::size_t count = win.last - win.first + 1;
  const std::size_t stride = std::max<std::size_t>(1, count / 200);
  const double h = (t[win.first + stride] - t[win.first]);
  double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
  for (std::size_t j = win.first; j + 2 * stride <= win.last; j += stride) {
    const double u = z[j + stride], v = z[j], y = z[j + 2 * stride];
    a11 += u * u;
    a12 += u * v;
    a22 += v * v;
    r1 += u * y;
    r2 += v * y;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 0.0)) fail_numerical("modal.fit_failed", "degenerate linear-prediction system");
  const double p = (r1 * a22 - r2 * a12) / det;
  const double r = (a11 * r2 - a12 * r1) / det;
  // roots of x^2 - p x - r
  const double disc = p * p + 4.0 * r;
  if (disc >= 0.0) fail_numerical("modal.not_oscillatory", "linear prediction has real roots");
  const double modulus = std::sqrt(-r);
  const double angle = std::atan2(std::sqrt(-disc) / 2.0, p / 2.0);
  DecayFit fit;
  fit.model = DecayModel::OscillatoryExponential;
  fit.rate = std::log(modulus) / h;
  fit.frequency = angle / h;
  std::vector<double> y(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) y[j] = z[j] * std::exp(-fit.rate * t[j]);
  const double K = fit.frequency;
  const auto [x1, x2] = two_term_fit(
      t, y, win, [K](double x) { return std::sin(K * x); }, [K](double x) { return std::cos(K * x); });
  fit.xi1 = x1;
  fit.xi2 = x2;
  const double rate = fit.rate;
  finish(fit, t, z, win, w, [&](double x) {
    return (x1 * std::sin(K * x) + x2 * std::cos(K * x)) * std::exp(rate * x);
  });
  return fit;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& z, const JLReport& report,
                   FitWindow window) {
  switch (report.jl_class) {
    case JLClass::Supercritical: return fit_pure_exponential(t, z, window);
    case JLClass::Critical: return fit_linear_times_exponential(t, z, report.constants.sigma, window);
    case JLClass::Subcritical:
      return fit_oscillatory(t, z, report.constants.sigma, report.K.value_or(0.0), window);
  }
  fail_validation("modal.bad_class", "unknown class");
}

}  // namespace jlflux
