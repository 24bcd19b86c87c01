#include "qdot/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "qdot/error.hpp"

namespace qdot {

GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n) {
  if (n < 1) throw Error(ErrorCode::InvalidValue, "Gauss-Legendre rule needs at least one point");
  // Newton iteration on P_n from the Chebyshev-like initial guess; the rule
  // is symmetric so only half the roots are computed.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureTable make_composite_rule(std::span<const double> breakpoints, int points_per_cell) {
  const GaussLegendre gl(points_per_cell);
  QuadratureTable q;
  q.points_per_cell = points_per_cell;
  q.edges.assign(breakpoints.begin(), breakpoints.end());
  const int cells = static_cast<int>(breakpoints.size()) - 1;
  q.nodes.reserve(static_cast<std::size_t>(cells * points_per_cell));
  for (int c = 0; c < cells; ++c) {
    const double lo = breakpoints[c], hi = breakpoints[c + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int j = 0; j < points_per_cell; ++j) {
      q.nodes.push_back(mid + half * gl.nodes[j]);
      q.weights.push_back(half * gl.weights[j]);
      q.cell.push_back(c);
    }
  }
  return q;
}

}  // namespace qdot
