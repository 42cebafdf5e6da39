#ifndef MEMDYN_ROOTS_HPP_
#define MEMDYN_ROOTS_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace memdyn
{

/**
 * @brief Bisection on a sign-change bracket [a, b], to |b - a| <= rel_tol * max(|a|, |b|, abs_floor).
 */
template <typename F>
double bisect(F && f, double a, double b, double rel_tol = 1e-10, double abs_floor = 1e-300, int max_iter = 400)
{
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) {
    return a;
  }
  if (fb == 0.0) {
    return b;
  }
  if ((fa > 0.0) == (fb > 0.0)) {
    throw std::invalid_argument("bisect: interval does not bracket a sign change");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    if (std::abs(b - a) <= rel_tol * std::max({std::abs(a), std::abs(b), abs_floor})) {
      return m;
    }
    const double fm = f(m);
    if (fm == 0.0) {
      return m;
    }
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Grid intervals on which f changes sign (a zero at a node opens a bracket to its right).
inline std::vector<std::pair<std::size_t, std::size_t>> sign_change_intervals(const std::vector<double> & values)
{
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    if ((values[k] > 0.0) != (values[k + 1] > 0.0)) {
      out.emplace_back(k, k + 1);
    }
  }
  return out;
}

}  // namespace memdyn

#endif  // MEMDYN_ROOTS_HPP_
