#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arcflow::numerics {

/// Finite-difference weights for derivatives 0..max_order at `x0` on the
/// nodes `xs` (Fornberg's recursion). Returns weights[order][node].
std::vector<std::vector<double>> fd_weights(std::span<const double> xs, double x0,
                                            std::size_t max_order);

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Composite Gauss-Legendre quadrature of f over [a, b] with `panels` panels.
template <class F>
double integrate(F&& f, double a, double b, std::size_t panels);

}  // namespace arcflow::numerics

#include <boost/math/quadrature/gauss.hpp>

namespace arcflow::numerics {

template <class F>
double integrate(F&& f, double a, double b, std::size_t panels) {
  if (panels == 0) panels = 1;
  const double width = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + width * static_cast<double>(k);
    sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, lo + width);
  }
  return sum;
}

}  // namespace arcflow::numerics
