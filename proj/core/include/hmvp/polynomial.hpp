#pragma once

#include <string>
#include <vector>

#include "hmvp/calculus.hpp"

namespace hmvp {

/// A polynomial in t and x_1..x_{2n+1} as a sum of monomial terms.  This is
/// the field DSL of the CLI: rich enough for every built-in test field while
/// keeping derivatives exact (so analytic jets carry no truncation error).
class Polynomial {
 public:
  struct Term {
    double coeff = 0.0;
    int t_exp = 0;
    std::vector<int> x_exps;  // length 2n+1
  };

  Polynomial() = default;
  Polynomial(int group_index, std::vector<Term> terms);

  /// Parses e.g. "12*t^2 + 12*x1^2*t + x1^4" or "x1*x2 - 1/8".  Adjacent
  /// factors multiply; coefficients may be integers, rationals a/b, or
  /// decimals.  Variables: t, x1..x{2n+1}.
  static Polynomial parse(const std::string& expr, int group_index);

  int group_index() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double operator()(double t, const HPoint& x) const;

  Polynomial d_dt() const;
  Polynomial d_dx(int coord) const;  // coord in 1..2n+1

  std::string to_string() const;

  /// Wraps the polynomial as a ScalarField with an exact analytic jet.
  ScalarField field(const std::string& label) const;

 private:
  int n_ = 1;
  std::vector<Term> terms_;
  void normalize();
};

/// Named built-in fields.  Throws invalid_argument for unknown ids; the
/// catalogue (id, n, expression) is available for help output.
ScalarField builtin_field(const std::string& id);
struct BuiltinFieldInfo {
  std::string id;
  int n;
  std::string expression;
};
const std::vector<BuiltinFieldInfo>& builtin_field_catalogue();

}  // namespace hmvp
