#ifndef MEMDYN_BESSEL_HPP_
#define MEMDYN_BESSEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace memdyn
{

/**
 * @brief Integer-order Bessel functions J_n(x), n in [-N, N], for one argument.
 *
 * Values come from Miller's downward recurrence normalised with
 * J_0 + 2 sum J_2k = 1, so the whole table costs one pass. Orders outside
 * the table read as zero; callers keep N above the convergence guard.
 */
class BesselTable
{
public:
  BesselTable() = default;

  BesselTable(double x, int max_order)
  : x_(x), max_order_(std::max(max_order, 1)), values_(2 * static_cast<std::size_t>(max_order_) + 1, 0.0)
  {
    fill();
  }

  double argument() const noexcept { return x_; }
  int max_order() const noexcept { return max_order_; }

  double operator()(int n) const noexcept
  {
    if (n < -max_order_ || n > max_order_) {
      return 0.0;
    }
    return values_[static_cast<std::size_t>(n + max_order_)];
  }

private:
  void fill()
  {
    const double ax = std::abs(x_);
    std::vector<double> pos(static_cast<std::size_t>(max_order_) + 1, 0.0);
    if (ax == 0.0) {
      pos[0] = 1.0;
    } else {
      const int top = std::max(max_order_, static_cast<int>(ax));
      int start = top + 15 + static_cast<int>(std::sqrt(40.0 * top));
      start += start % 2;

      const double two_over_x = 2.0 / ax;
      double j_above = 0.0;
      double j_here = 1e-300;
      double norm = 0.0;
      for (int k = start; k > 0; --k) {
        const double j_below = k * two_over_x * j_here - j_above;
        j_above = j_here;
        j_here = j_below;
        if (std::abs(j_here) > 1e250) {
          j_here *= 1e-250;
          j_above *= 1e-250;
          norm *= 1e-250;
          for (auto & v : pos) {
            v *= 1e-250;
          }
        }
        const int order = k - 1;
        if (order <= max_order_) {
          pos[static_cast<std::size_t>(order)] = j_here;
        }
        if (order > 0 && order % 2 == 0) {
          norm += 2.0 * j_here;
        }
      }
      norm += j_here;  // J_0
      for (auto & v : pos) {
        v /= norm;
      }
    }

    // J_n(-x) = (-1)^n J_n(x);  J_{-n}(x) = (-1)^n J_n(x).
    const bool negative = x_ < 0.0;
    for (int n = 0; n <= max_order_; ++n) {
      const double odd = (n % 2 == 1) ? -1.0 : 1.0;
      const double jn = negative ? odd * pos[static_cast<std::size_t>(n)] : pos[static_cast<std::size_t>(n)];
      values_[static_cast<std::size_t>(max_order_ + n)] = jn;
      values_[static_cast<std::size_t>(max_order_ - n)] = odd * jn;
    }
  }

  double x_ = 0.0;
  int max_order_ = 1;
  std::vector<double> values_ = std::vector<double>(3, 0.0);
};

/// Smallest admissible truncation for a Bessel sum with modulation index xi.
inline int required_truncation(double xi) { return static_cast<int>(std::ceil(3.0 * std::abs(xi))) + 10; }

/// Default truncation: guard plus a margin of ten orders.
inline int default_truncation(double xi) { return static_cast<int>(std::ceil(3.0 * std::abs(xi))) + 20; }

}  // namespace memdyn

#endif  // MEMDYN_BESSEL_HPP_
