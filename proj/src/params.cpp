#include "jlflux/params.hpp"

#include <cmath>
#include <sstream>

#include "jlflux/error.hpp"

namespace jlflux {

void validate(const ProblemParams& params) {
  if (params.n < 3) {
    std::ostringstream msg;
    msg << "dimension must satisfy n >= 3 (got n = " << params.n << ")";
    fail_validation("params.n_too_small", msg.str());
  }
  if (!std::isfinite(params.q) || params.q <= 1.0) {
    std::ostringstream msg;
    msg << "exponent must satisfy q > 1 (got q = " << params.q << ")";
    fail_validation("params.q_not_above_one", msg.str());
  }
  if (!std::isfinite(params.a) || params.a <= -1.0 || params.a >= 1.0) {
    std::ostringstream msg;
    msg << "weight exponent must satisfy -1 < a < 1 (got a = " << params.a << ")";
    fail_validation("params.a_out_of_range", msg.str());
  }
  if (params.a == 0.0) {
    fail_validation("params.a_is_zero", "weight exponent a = 0 is excluded");
  }
}

DerivedConstants derive(const ProblemParams& params) {
  validate(params);
  const double d = effective_dimension(params.n, params.a);
  DerivedConstants c;
  c.m_q = (1.0 - params.a) / (params.q - 1.0);
  c.gamma = c.m_q * (d - c.m_q);
  c.sigma = d - 2.0 * c.m_q;
  c.h_na = -d * d / 4.0;
  c.q_crit = (params.n - params.a) / d;
  c.q_sing = (params.n - 1.0) / d;
  c.in_theorem_scope = params.a < 0.0;
  return c;
}

}  // namespace jlflux
