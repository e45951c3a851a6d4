#pragma once

#include <filesystem>
#include <vector>

#include "jlflux/angular_profile.hpp"
#include "jlflux/modal.hpp"
#include "jlflux/params.hpp"

namespace jlflux {

// Vertex-centred finite-volume mesh on theta in [0, pi/2]. Nodes are images
// of uniform s under u = sin^2 theta = I_s(p0, 3), the regularized incomplete
// beta function; p0 = 2 for n <= 4 and 1 otherwise. Each node owns the dual
// cell between neighbouring face midpoints (in u) with its exact mu-mass.
// With the flux weight P(u) = P0 P1, P0 = 2 u^{(n-1)/2}, P1 = (1-u)^{(a+1)/2},
// each face carries the two-point coefficient
//   P0(u_f) / int du / P1(u)
// at the face midpoint u_f, exact for profiles with P1 y' locally constant.
struct ThetaMesh {
  int n = 0;
  double a = 0.0;
  int cells = 0;
  std::vector<double> u, one_minus_u, theta;
  std::vector<double> mass;  // size cells + 1
  std::vector<double> face;  // size cells

  int nodes() const { return cells + 1; }
};

ThetaMesh make_theta_mesh(int n, double a, int cells);

// Discrete Dirichlet form y^T A y = sum_faces face (y_{k+1} - y_k)^2.
double dirichlet_form(const ThetaMesh& mesh, const std::vector<double>& y);

// Discrete stationary profile: (A + gamma M) V = e_B V_B^q with V > 0.
std::vector<double> discrete_singular_profile(const ThetaMesh& mesh, double q, double gamma);

// Generalized eigenpairs of (A - beta e_B e_B^T) phi = lambda M phi, ascending,
// M-orthonormal with phi_B >= 0 for the first vector.
struct DiscreteModes {
  std::vector<double> lambda;
  std::vector<std::vector<double>> vectors;
};

DiscreteModes discrete_modes(const ThetaMesh& mesh, double beta);

struct CylinderGrid {
  int t_steps = 400;
  int theta_cells = 64;
  double horizon = 20.0;
  double t_begin = 0.0;
};

enum class LeftCondition {
  Data,           // v(t_begin, .) prescribed
  RegularOrigin,  // v ~ const * e^{m_q t}: every mode of the Neumann problem
                  // takes its growing root, and the mu-mean of v(t_begin, .)
                  // is fixed to origin_level times that of V
};

enum class RightCondition {
  Dirichlet,   // v(T, .) = V
  Asymptotic,  // w = V - v: modes i >= 2 of the problem linearized at V take
               // their decaying root rho_i^-. Mode 1 takes the slower root
               // (real part -sigma/2 when the roots coincide or are complex)
               // under Data, and is left free under RegularOrigin.
};

const char* to_string(LeftCondition c);
const char* to_string(RightCondition c);

struct CylinderOptions {
  CylinderGrid grid;
  LeftCondition left = LeftCondition::Data;
  RightCondition right = RightCondition::Dirichlet;
  std::vector<double> left_data;  // node values; empty means left_factor * V
  double left_factor = 0.99;
  double origin_level = 0.1;
  double min_sigma_T = 10.0;
  double tolerance = 1e-10;  // Newton stop, max-norm of the scaled residual
  int max_iterations = 60;
  int max_halvings = 30;
};

// v(t_j, theta_k) stored row-major: values[j * nodes + k]. For a linearized
// run the stored field is w.
struct CylinderField {
  ProblemParams params;
  DerivedConstants constants;
  CylinderOptions options;
  ThetaMesh mesh;
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> singular;  // discrete V on the nodes
  bool linear = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<int> damping;  // halvings taken per Newton step
  double mode1_ghost = 0.0;  // free mode-1 ghost amplitude under RegularOrigin

  int nodes() const { return mesh.nodes(); }
  int levels() const { return static_cast<int>(t.size()); }
  double step() const { return t[1] - t[0]; }
  double at(int j, int k) const { return values[static_cast<std::size_t>(j) * nodes() + k]; }
  std::vector<double> slice(int j) const;
  std::vector<double> w_slice(int j) const;  // V - v, or the stored w
  std::vector<double> boundary_trace() const;
};

// Damped Newton on the full nonlinear system, banded LU for each step.
// Throws Error(Validation, ...) for unordered or non-positive left data and
// for sigma T below min_sigma_T; Error(Numerical, "cylinder.newton_failed")
// with the residual and damping history; Error(Numerical,
// "cylinder.positivity_lost") naming the node.
CylinderField solve_nonlinear(const ProblemParams& params, const CylinderOptions& options = {});

// Linear problem for w with boundary coefficient q V_B^{q-1} and w(t_begin) =
// left_w, right condition per options (Dirichlet means w(T) = 0). Solved by
// diagonalizing the theta operator and a tridiagonal solve per mode.
CylinderField solve_linearized(const ProblemParams& params, const std::vector<double>& left_w,
                               const CylinderOptions& options = {});

// Same linear problem assembled as one banded system.
CylinderField solve_linearized_banded(const ProblemParams& params, const std::vector<double>& left_w,
                                      const CylinderOptions& options = {});

// z_i(t_j) = sum_k M_k w(t_j, theta_k) e_i(theta_k).
std::vector<ModalTrajectory> project_modes(const CylinderField& field,
                                           const std::vector<AngularProfile>& profiles);
std::vector<ModalTrajectory> project_modes(const CylinderField& field, const DiscreteModes& modes,
                                           int count);

// Discrete mu-norm squared, sum_k M_k y_k^2.
double mass_norm2(const ThetaMesh& mesh, const std::vector<double>& y);

// E = 1/2 |v_t|^2 - gamma/2 |v|^2 - 1/2 y^T A y + v_B^{q+1}/(q+1) on levels
// 1..L-1 with centred v_t, and identity residual dE/dt + sigma |v_t|^2 on
// levels 2..L-2 with centred dE/dt.
struct EnergyTrace {
  std::vector<double> t, energy, dissipation;  // dissipation = -sigma |v_t|^2
  std::vector<double> t_residual, residual;
};

EnergyTrace energy_trace(const CylinderField& field);

// u(r, theta) = r^{-m_q} v(ln r, theta) on the log-radial grid.
struct PhysicalField {
  std::vector<double> r, theta;
  std::vector<double> u;  // u[j * theta.size() + k]
};

PhysicalField to_physical(const CylinderField& field);

// u_beta(x) = beta u_1(beta^{1/m_q} x) with beta = e^{m_q shift h}, so that
// beta^{1/m_q} r_j = r_{j+shift}. Rows run over j = 0 .. levels - 1 - shift.
PhysicalField scale_physical(const PhysicalField& u1, double m_q, int shift);

double scaling_beta(const CylinderField& field, int shift);

// max over the grid of u (1 + r)^{m_q}.
double decay_bound(const PhysicalField& u, double m_q);

// Long format: t,theta,v,w per node.
void write_field_csv(const CylinderField& field, const std::filesystem::path& path);

}  // namespace jlflux
