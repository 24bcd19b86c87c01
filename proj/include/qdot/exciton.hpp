#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qdot/dielectric.hpp"
#include "qdot/materials.hpp"
#include "qdot/radial.hpp"

namespace qdot {

/// Radial part of multipole `lambda` of the electrostatic Green function for
/// two charges inside the well, in eV:
///   4 pi e^2 / (eps1 (2 lambda + 1)(1 - p q)) [r<^l + p r<^-(l+1)] [r>^-(l+1) + q r>^l]
/// Throws OutsideWell unless a <= r1, r2 <= b.
double kernel_radial(const Device& device, int lambda, double r1, double r2, ImageForm form = ImageForm::Corrected);

/// Multipole kernel with the angular closure factor (2l+1)/(4 pi) folded in,
///   g(r1, r2) = prefactor * inner(r<) * outer(r>),
/// defined on the whole box. Inside the well inner = r^l + p r^-(l+1) and
/// outer = r^-(l+1) + q r^l. Elsewhere (Corrected form) both are continued as
/// solutions of the layered radial Poisson equation, continuous with
/// continuous eps * derivative at a and b, regular at 0 and decaying at
/// infinity respectively. The Printed form keeps the well expressions
/// everywhere.
class MultipoleKernel {
 public:
  MultipoleKernel(const Device& device, int lambda, ImageForm form = ImageForm::Corrected);

  int lambda() const noexcept { return lambda_; }
  /// e^2 / (eps1 (1 - pq)), eV nm
  double prefactor() const noexcept { return prefactor_; }
  double inner(double r) const;  ///< factor of r<
  double outer(double r) const;  ///< factor of r>
  double operator()(double r1, double r2) const;

 private:
  struct Piece {
    double rl = 0.0;  // coefficient of r^l
    double rm = 0.0;  // coefficient of r^-(l+1)
  };
  double eval(const Piece& c, double r) const;
  int region(double r) const noexcept { return r < a_ ? 0 : (r <= b_ ? 1 : 2); }

  int lambda_;
  double a_, b_, p_scaled_, prefactor_;
  ImageForm form_;
  Piece inner_[3], outer_[3];
};

/// Double radial integrals int int rho1(r1) g(r1, r2) rho2(r2) dr1 dr2 of a
/// multipole kernel g = prefactor * inner(r<) * outer(r>) over the basis
/// domain. The inner integral is split at r1 = r2: whole cells are summed
/// once and the cell holding r1 gets its own Gauss rule on each side, so the
/// kink of the kernel never sits inside a quadrature panel.
class PairIntegrator {
 public:
  PairIntegrator(std::shared_ptr<const RadialBasis> basis, const MultipoleKernel& kernel);

  /// Orbital values sum_n C(n, j) u_n at the quadrature nodes and at the
  /// split-rule nodes.
  struct Table {
    Eigen::MatrixXd nodes;
    Eigen::MatrixXd split;
  };
  Table tabulate(const Eigen::MatrixXd& coefficients) const;

  /// W(x_q) = int g(x_q, r) rho(r) dr at every quadrature node, with rho given
  /// on both node sets.
  Eigen::VectorXd potential(const Eigen::Ref<const Eigen::VectorXd>& rho_nodes,
                            const Eigen::Ref<const Eigen::VectorXd>& rho_split) const;

  /// Full double integral for densities u_a u_b (first coordinate) and u_c u_d.
  double integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const Eigen::VectorXd& d) const;

  const RadialBasis& basis() const noexcept { return *basis_; }

 private:
  std::shared_ptr<const RadialBasis> basis_;
  double prefactor_;
  int points_;
  std::vector<double> split_r_, split_w_;  // 2P per node: left panel then right panel
  std::vector<double> split_inner_, split_outer_;
  Eigen::VectorXd node_inner_, node_outer_;
};

/// <(l' l')L=0 | P_lambda(cos theta_eh) | (l l)L=0>, the angular weight of
/// multipole lambda between pair states with equal electron and hole angular
/// momenta coupled to zero total angular momentum.
double angular_coefficient(int l_bra, int l_ket, int lambda);

/// Wigner 3j symbol (j1 j2 j3; 0 0 0).
double three_j_zero(int j1, int j2, int j3);

struct PairState {
  int n_e = 0;  ///< 0-based radial index of the electron
  int n_h = 0;
  int l = 0;    ///< shared orbital angular momentum of electron and hole
};

/// Product basis of electron and hole radial states with l_e = l_h = l
/// coupled to L = 0, ordered by l, then n_e, then n_h.
struct ExcitonBasis {
  std::vector<PairState> states;
  int l_max = 0;
  int n_max = 0;

  static ExcitonBasis make(int l_max, int n_max);
  int size() const noexcept { return static_cast<int>(states.size()); }
  int index(int n_e, int n_h, int l) const noexcept { return l * n_max * n_max + n_e * n_max + n_h; }
};

struct CiOptions {
  int l_max = 3;
  int n_max = 8;
  double interaction_scale = 1.0;  ///< multiplies V_c (0 switches the interaction off)
  ImageForm image_form = ImageForm::Corrected;
};

/// One-particle input: electron[l] and hole[l] for l = 0..l_max, all on the
/// same radial basis.
struct OneParticleSet {
  std::vector<RadialSolution> electron;
  std::vector<RadialSolution> hole;
};

struct CiMatrices {
  ExcitonBasis basis;
  Eigen::VectorXd diagonal;  ///< E_e + E_h per pair state
  Eigen::MatrixXd V;         ///< electron-hole interaction (already scaled)
  Eigen::MatrixXd H() const { return Eigen::MatrixXd(diagonal.asDiagonal()) + V; }
};

struct ExcitonSolution {
  ExcitonBasis basis;
  Eigen::VectorXd energies;      ///< ascending, eV, confinement + interaction (gap excluded)
  Eigen::MatrixXd coefficients;  ///< CI vectors as columns
  Eigen::MatrixXd V;             ///< interaction matrix, for expectation values
  OneParticleSet particles;

  int size() const noexcept { return static_cast<int>(energies.size()); }
};

/// Solve every (particle, l) channel for l = 0..l_max with n_max states.
OneParticleSet solve_one_particle(std::shared_ptr<const RadialBasis> basis, const Device& device, int l_max,
                                  int n_max, bool include_selfpol, int selfpol_lmax,
                                  ImageForm form = ImageForm::Corrected);

/// Diagonal and interaction blocks of the CI Hamiltonian. Throws BasisMismatch
/// when the one-particle solutions disagree on basis or carry too few states.
CiMatrices ci_assemble(const OneParticleSet& particles, const Device& device, const CiOptions& options);

ExcitonSolution ci_solve(const CiMatrices& m, const OneParticleSet& particles);

/// -<psi_a|V_c|psi_a>, positive for a bound pair.
double binding_energy(const ExcitonSolution& sol, int state);

/// First-order binding -<e1 h1|V_c|e1 h1> from the ground l = 0 one-particle states.
double perturbative_binding(const OneParticleSet& particles, const Device& device,
                            ImageForm form = ImageForm::Corrected);

/// One-particle solves, assembly and diagonalisation with the numerics block
/// of a configuration (n_max, l_max, self-polarisation, image form).
ExcitonSolution solve_exciton(const Device& device, const Numerics& numerics, double interaction_scale = 1.0);

/// Lowest pair-continuum threshold: a carrier at its barrier edge and the
/// other one in its ground state. Exciton states below it are bound.
double ionization_threshold(const OneParticleSet& particles, const Device& device);

}  // namespace qdot
