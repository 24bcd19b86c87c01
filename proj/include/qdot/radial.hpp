#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qdot/bspline.hpp"
#include "qdot/config.hpp"
#include "qdot/dielectric.hpp"
#include "qdot/materials.hpp"

namespace qdot {

struct ChannelSpec {
  Particle particle = Particle::Electron;
  int l = 0;
  bool include_selfpol = true;
  int selfpol_lmax = 80;
  ImageForm image_form = ImageForm::Corrected;
};

struct RadialMatrices {
  Eigen::MatrixXd H;
  Eigen::MatrixXd S;
};

/// One-particle eigenpairs of a single (particle, l) channel. Coefficients
/// expand the reduced radial function u = r R(r) over the retained orbitals.
struct RadialSolution {
  ChannelSpec channel;
  std::shared_ptr<const RadialBasis> basis;
  std::vector<double> energies;   ///< ascending, eV
  Eigen::MatrixXd coefficients;   ///< one column per state
  Eigen::MatrixXd overlap;        ///< Gram matrix S of the orbitals
  double barrier = 0.0;           ///< states below this are bound

  int size() const noexcept { return static_cast<int>(energies.size()); }
  bool bound(int state) const { return energies.at(static_cast<std::size_t>(state)) < barrier; }
  int bound_count() const;
  /// u_state at the quadrature nodes of the basis.
  Eigen::VectorXd on_nodes(int state) const;
};

/// H and S of the weak form
///   H_ij = hbar^2/2m0 int (1/m) (u_i' - u_i/r)(u_j' - u_j/r) dr
///        + hbar^2/2m0 int l(l+1)/(m r^2) u_i u_j dr + int V u_i u_j dr
///   S_ij = int u_i u_j dr
/// given 1/m and V tabulated on the basis quadrature nodes. The kinetic form
/// is the radial part of int (1/m) |grad psi|^2 d^3r, so its natural interface
/// condition is continuity of (1/m) dpsi/dr with psi = u/r.
RadialMatrices assemble_on_nodes(const RadialBasis& basis, std::span<const double> inv_mass,
                                 std::span<const double> potential, int l);

/// Device channel: step potential, position-dependent mass and, optionally,
/// the self-polarisation potential inside the well. Throws
/// InconsistentGeometry unless the basis spans [0, R] with a and b as
/// breakpoints.
RadialMatrices assemble(const RadialBasis& basis, const Device& device, const ChannelSpec& channel);

/// Lowest n_states generalised eigenpairs of H c = E S c, ascending and
/// S-orthonormal, each sign fixed so that its first significant coefficient
/// is positive.
RadialSolution solve(const RadialMatrices& m, int n_states);

/// Assemble and solve one device channel.
RadialSolution solve_channel(std::shared_ptr<const RadialBasis> basis, const Device& device,
                             const ChannelSpec& channel, int n_states);

/// Basis built from the numerics block of a configuration.
std::shared_ptr<const RadialBasis> make_basis(const Device& device, const Numerics& numerics);

/// Jumps (right minus left) of psi = u/r and of (1/m) dpsi/dr at a and b.
struct MatchingResidual {
  double psi_a = 0.0;
  double psi_b = 0.0;
  double flux_a = 0.0;
  double flux_b = 0.0;
};

MatchingResidual matching_residual(const RadialSolution& solution, const Device& device, int state);

/// Dirichlet shell [a, b] with the well mass: l = 0 in closed form, l > 0 from
/// the n-th zero of j_l(ka) y_l(kb) - j_l(kb) y_l(ka) (j_l(kb) when a = 0).
double infinite_well_reference(const Device& device, double m_well, int l, int n);

}  // namespace qdot
