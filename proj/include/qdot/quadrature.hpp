#pragma once

#include <span>
#include <vector>

namespace qdot {

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);
  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// Composite rule: one Gauss-Legendre block per nonempty subinterval. Nodes
/// are strictly interior to their subinterval, never on a breakpoint.
struct QuadratureTable {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<int> cell;          ///< subinterval index of each node
  std::vector<double> edges;      ///< distinct breakpoints, edges.size() = cells + 1
  int points_per_cell = 0;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
  int cells() const noexcept { return static_cast<int>(edges.size()) - 1; }
  /// First node index of a cell; nodes of a cell are contiguous.
  int begin(int c) const noexcept { return c * points_per_cell; }

  /// Sum of w_i f(x_i).
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

QuadratureTable make_composite_rule(std::span<const double> breakpoints, int points_per_cell);

}  // namespace qdot
