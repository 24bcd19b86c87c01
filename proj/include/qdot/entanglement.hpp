#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qdot/config.hpp"
#include "qdot/exciton.hpp"

namespace qdot {

struct SchmidtSpectrum {
  std::vector<double> lambdas;  ///< descending
  double entropy = 0.0;         ///< nats
};

/// Uncoupled single-particle index (n, l, m) of the product expansion; the
/// electron and the hole share the same layout.
struct OrbitalIndex {
  int n = 0;
  int l = 0;
  int m = 0;
};

/// Orbital layout used by coefficient_matrix: l ascending, then m from -l to
/// l, then n. Size n_max (l_max+1)^2.
std::vector<OrbitalIndex> orbital_layout(int l_max, int n_max);

/// C with Psi = sum_ab C_ab phi_a^e phi_b^h, phi = (u_nl / r) Y_lm, from the
/// coupled CI vector via <l m l -m|0 0> = (-1)^(l-m) / sqrt(2l+1).
Eigen::MatrixXd coefficient_matrix(const ExcitonSolution& sol, int state);

/// Squared singular values of C and S = -sum lambda ln lambda. Throws
/// NotNormalized when |C|_F differs from 1 by more than 1e-10.
SchmidtSpectrum entropy(const Eigen::MatrixXd& C);

/// Entropy of a coupled state computed per l block: every singular value s
/// of the n_max x n_max block c^(l) contributes 2l+1 weights s^2 / (2l+1).
SchmidtSpectrum state_entropy(const ExcitonSolution& sol, int state);

struct EntropyRow {
  double a_over_b = 0.0;
  int state = 0;
  double energy = 0.0;   ///< eV
  double binding = 0.0;  ///< eV
  double entropy = 0.0;  ///< nats
};

/// Energy, binding and entropy of the lowest `states` exciton states with the
/// core radius set to ratio * b for every ratio in the grid.
std::vector<EntropyRow> entropy_scan(const Device& device, const Numerics& numerics,
                                     const std::vector<double>& a_over_b, int states,
                                     double interaction_scale = 1.0);

}  // namespace qdot
