#pragma once

namespace jlflux {

// Parameters of  -div(x_n^a grad u) = 0  in the upper half space with the
// boundary flux  du/dnu^a = u^q.
struct ProblemParams {
  int n = 3;       // dimension, n >= 3
  double a = -0.5; // weight exponent, a in (-1, 1), a != 0
  double q = 7.0;  // boundary nonlinearity exponent, q > 1

  bool operator==(const ProblemParams&) const = default;
};

struct DerivedConstants {
  double m_q = 0.0;     // decay exponent (1-a)/(q-1)
  double gamma = 0.0;   // m_q (n+a-2-m_q)
  double sigma = 0.0;   // drift (n+a-2) - 2 m_q
  double h_na = 0.0;    // -(n+a-2)^2/4
  double q_crit = 0.0;  // (n-a)/(n+a-2)
  double q_sing = 0.0;  // (n-1)/(n+a-2)
  // False when a lies in (0,1): the decay and expansion results only cover
  // a in (-1,0). Profiles and spectra are still computed there.
  bool in_theorem_scope = true;
};

// Throws Error(Validation) with codes params.n_too_small, params.q_not_above_one,
// params.a_out_of_range or params.a_is_zero.
void validate(const ProblemParams& params);

DerivedConstants derive(const ProblemParams& params);

// n + a - 2, the quantity most closed forms are built from.
inline double effective_dimension(int n, double a) { return n + a - 2.0; }

}  // namespace jlflux
