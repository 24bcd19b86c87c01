#include "qdot/exciton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qdot/error.hpp"
#include "qdot/quadrature.hpp"
#include "qdot/simd/kernels.hpp"
#include "qdot/units.hpp"

namespace qdot {

namespace {

// Continues A r^l + B r^-(l+1) across an interface at r0 keeping the value
// and eps times the derivative continuous.
void match(int l, double r0, double eps_from, double eps_to, double A, double B, double& A_to, double& B_to) {
  const double u = std::pow(r0, l), v = std::pow(r0, -(l + 1));
  const double F = A * u + B * v;
  const double G = eps_from * (l * A * u - (l + 1) * B * v) / r0;
  A_to = ((l + 1) * F + r0 * G / eps_to) / ((2 * l + 1) * u);
  B_to = (F - A_to * u) / v;
}

}  // namespace

MultipoleKernel::MultipoleKernel(const Device& device, int lambda, ImageForm form)
    : lambda_(lambda), a_(device.a), b_(device.b), form_(form) {
  if (lambda < 0) throw Error(ErrorCode::InvalidValue, "multipole order must be >= 0");
  const ImageCoefficients c = image_coefficients(device, lambda);
  p_scaled_ = c.p_scaled;
  prefactor_ = units::coulomb_k / (device.eps_well() * (1.0 - c.pq));
  const double p = a_ > 0.0 ? c.p() : 0.0, q = c.q();
  const double e1 = device.eps_well(), e2 = device.eps_barrier();
  for (int j = 0; j < 3; ++j) {
    inner_[j] = {1.0, p};
    outer_[j] = {q, 1.0};
  }
  if (form == ImageForm::Printed) return;
  match(lambda, b_, e1, e2, inner_[1].rl, inner_[1].rm, inner_[2].rl, inner_[2].rm);
  // decaying in the clad; q is chosen so the growing part cancels
  outer_[2] = {0.0, 1.0 + c.q_scaled};
  if (a_ > 0.0) {
    match(lambda, a_, e1, e2, outer_[1].rl, outer_[1].rm, outer_[0].rl, outer_[0].rm);
    // regular at the origin
    inner_[0] = {1.0 + p * std::pow(a_, -(2 * lambda + 1)), 0.0};
  }
}

double MultipoleKernel::eval(const Piece& c, double r) const {
  const double x = std::pow(r, lambda_);
  return c.rl * x + (c.rm == 0.0 ? 0.0 : c.rm / (x * r));
}

double MultipoleKernel::inner(double r) const {
  if (form_ == ImageForm::Printed) {
    const double rl = std::pow(r, lambda_);
    if (a_ <= 0.0) return rl;
    return rl * (1.0 + p_scaled_ * std::pow(a_, 2 * lambda_ + 1) * r);
  }
  return eval(inner_[region(r)], r);
}

double MultipoleKernel::outer(double r) const { return eval(outer_[region(r)], r); }

double MultipoleKernel::operator()(double r1, double r2) const {
  const double lo = std::min(r1, r2), hi = std::max(r1, r2);
  return prefactor_ * inner(lo) * outer(hi);
}

double kernel_radial(const Device& device, int lambda, double r1, double r2, ImageForm form) {
  if (r1 < device.a || r1 > device.b || r2 < device.a || r2 > device.b) {
    throw Error(ErrorCode::OutsideWell, "kernel needs a <= r1, r2 <= b");
  }
  const double lo = std::min(r1, r2), hi = std::max(r1, r2);
  const ImageCoefficients c = image_coefficients(device, lambda);
  const double pref = 4.0 * std::numbers::pi * units::coulomb_k / (device.eps_well() * (2 * lambda + 1) * (1.0 - c.pq));
  // r<^l r>^-(l+1) [1 + p r<^-(2l+1)] [1 + q r>^(2l+1)] in bounded ratios
  const double core = form == ImageForm::Corrected
                          ? (device.a > 0.0 ? c.p_scaled * std::pow(device.a / lo, 2 * lambda + 1) : 0.0)
                          : c.p_scaled * std::pow(device.a, 2 * lambda + 1) * lo;
  const double clad = c.q_scaled * std::pow(hi / device.b, 2 * lambda + 1);
  return pref * std::pow(lo / hi, lambda) / hi * (1.0 + core) * (1.0 + clad);
}

double three_j_zero(int j1, int j2, int j3) {
  if (j1 < 0 || j2 < 0 || j3 < 0) throw Error(ErrorCode::InvalidValue, "negative angular momentum");
  const int J = j1 + j2 + j3;
  if (J % 2 != 0) return 0.0;
  if (j3 > j1 + j2 || j3 < std::abs(j1 - j2)) return 0.0;
  const int g = J / 2;
  const auto lf = [](int n) { return std::lgamma(n + 1.0); };
  const double log_mag = 0.5 * (lf(J - 2 * j1) + lf(J - 2 * j2) + lf(J - 2 * j3) - lf(J + 1)) + lf(g) - lf(g - j1) -
                         lf(g - j2) - lf(g - j3);
  return (g % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag);
}

double angular_coefficient(int l_bra, int l_ket, int lambda) {
  if (l_bra < 0 || l_ket < 0 || lambda < 0) throw Error(ErrorCode::InvalidValue, "negative angular momentum");
  const double tj = three_j_zero(l_bra, lambda, l_ket);
  if (tj == 0.0) return 0.0;
  return (lambda % 2 == 0 ? 1.0 : -1.0) * std::sqrt((2.0 * l_bra + 1) * (2.0 * l_ket + 1)) * tj * tj;
}

ExcitonBasis ExcitonBasis::make(int l_max, int n_max) {
  if (l_max < 0 || n_max < 1) throw Error(ErrorCode::InvalidValue, "need l_max >= 0 and n_max >= 1");
  ExcitonBasis b;
  b.l_max = l_max;
  b.n_max = n_max;
  for (int l = 0; l <= l_max; ++l)
    for (int e = 0; e < n_max; ++e)
      for (int h = 0; h < n_max; ++h) b.states.push_back({e, h, l});
  return b;
}

PairIntegrator::PairIntegrator(std::shared_ptr<const RadialBasis> basis, const MultipoleKernel& kernel)
    : basis_(std::move(basis)), prefactor_(kernel.prefactor()) {
  const QuadratureTable& q = basis_->quadrature();
  points_ = q.points_per_cell;
  const GaussLegendre gl(points_);
  const int P = points_;
  split_r_.resize(static_cast<std::size_t>(q.size()) * 2 * P);
  split_w_.resize(split_r_.size());
  for (int i = 0; i < q.size(); ++i) {
    const int c = q.cell[i];
    const double lo = q.edges[c], hi = q.edges[c + 1], x = q.nodes[i];
    for (int j = 0; j < P; ++j) {
      const double s = 0.5 * (1.0 + gl.nodes[j]);
      const std::size_t left = static_cast<std::size_t>(i) * 2 * P + j;
      split_r_[left] = lo + (x - lo) * s;
      split_w_[left] = 0.5 * (x - lo) * gl.weights[j];
      split_r_[left + P] = x + (hi - x) * s;
      split_w_[left + P] = 0.5 * (hi - x) * gl.weights[j];
    }
  }
  split_inner_.resize(split_r_.size());
  split_outer_.resize(split_r_.size());
  for (std::size_t j = 0; j < split_r_.size(); ++j) {
    split_inner_[j] = kernel.inner(split_r_[j]);
    split_outer_[j] = kernel.outer(split_r_[j]);
  }
  node_inner_.resize(q.size());
  node_outer_.resize(q.size());
  for (int i = 0; i < q.size(); ++i) {
    node_inner_[i] = kernel.inner(q.nodes[i]);
    node_outer_[i] = kernel.outer(q.nodes[i]);
  }
}

PairIntegrator::Table PairIntegrator::tabulate(const Eigen::MatrixXd& coefficients) const {
  const RadialBasis& B = *basis_;
  if (coefficients.rows() != B.size()) throw Error(ErrorCode::BasisMismatch, "coefficient rows != basis size");
  Table t;
  t.nodes = B.values() * coefficients;
  const KnotVector& kv = B.knots();
  const int k = kv.order();
  const auto& norm = B.norm_constants();
  const int cols = static_cast<int>(coefficients.cols());
  t.split.setZero(static_cast<Eigen::Index>(split_r_.size()), cols);
  std::vector<double> vals(k), ders(k);
  for (std::size_t j = 0; j < split_r_.size(); ++j) {
    const double r = split_r_[j];
    const int mu = kv.span(r);
    eval_nonzero(kv, mu, r, vals, ders);
    for (int s = 0; s < k; ++s) {
      const int n = mu - k + 1 + s - 1;  // retained orbital n is spline n+1
      if (n < 0 || n >= B.size()) continue;
      t.split.row(static_cast<Eigen::Index>(j)) += (norm[n] * vals[s]) * coefficients.row(n);
    }
  }
  return t;
}

Eigen::VectorXd PairIntegrator::potential(const Eigen::Ref<const Eigen::VectorXd>& rho_nodes,
                                          const Eigen::Ref<const Eigen::VectorXd>& rho_split) const {
  const QuadratureTable& q = basis_->quadrature();
  const int nq = q.size(), nc = q.cells(), P = points_;
  const auto& K = simd::kernels();
  // whole-cell moments of rho * inner and rho * outer
  std::vector<double> cell_in(nc), cell_out(nc);
  for (int c = 0; c < nc; ++c) {
    const int b = q.begin(c);
    double si = 0.0, so = 0.0;
    for (int i = b; i < b + P; ++i) {
      si += q.weights[i] * rho_nodes[i] * node_inner_[i];
      so += q.weights[i] * rho_nodes[i] * node_outer_[i];
    }
    cell_in[c] = si;
    cell_out[c] = so;
  }
  // below[c]: cells strictly left of c; above[c]: strictly right
  std::vector<double> below(nc + 1, 0.0), above(nc + 1, 0.0);
  for (int c = 0; c < nc; ++c) below[c + 1] = below[c] + cell_in[c];
  for (int c = nc - 1; c >= 0; --c) above[c] = above[c + 1] + cell_out[c];

  Eigen::VectorXd W(nq);
  for (int i = 0; i < nq; ++i) {
    const int c = q.cell[i];
    const std::size_t o = static_cast<std::size_t>(i) * 2 * P;
    const double lower = below[c] + K.weighted_dot(&split_w_[o], &split_inner_[o], rho_split.data() + o, P);
    const double upper = above[c + 1] + K.weighted_dot(&split_w_[o + P], &split_outer_[o + P],
                                                       rho_split.data() + o + P, P);
    W[i] = prefactor_ * (node_outer_[i] * lower + node_inner_[i] * upper);
  }
  return W;
}

double PairIntegrator::integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                const Eigen::VectorXd& d) const {
  Eigen::MatrixXd C(basis_->size(), 4);
  C << a, b, c, d;
  const Table t = tabulate(C);
  const Eigen::VectorXd rho2 = t.nodes.col(2).cwiseProduct(t.nodes.col(3));
  const Eigen::VectorXd rho2s = t.split.col(2).cwiseProduct(t.split.col(3));
  const Eigen::VectorXd W = potential(rho2, rho2s);
  const auto& w = basis_->quadrature().weights;
  double s = 0.0;
  for (int i = 0; i < W.size(); ++i) s += w[i] * t.nodes(i, 0) * t.nodes(i, 1) * W[i];
  return s;
}

namespace {

void check_particles(const OneParticleSet& particles, int l_max, int n_max) {
  if (static_cast<int>(particles.electron.size()) <= l_max || static_cast<int>(particles.hole.size()) <= l_max) {
    throw Error(ErrorCode::BasisMismatch, "one-particle channels missing for l <= " + std::to_string(l_max));
  }
  const auto& basis = particles.electron.front().basis;
  for (int l = 0; l <= l_max; ++l) {
    for (const RadialSolution* s : {&particles.electron[l], &particles.hole[l]}) {
      if (s->basis != basis) throw Error(ErrorCode::BasisMismatch, "one-particle solutions use different bases");
      if (s->channel.l != l) throw Error(ErrorCode::BasisMismatch, "channel list out of order");
      if (s->size() < n_max) throw Error(ErrorCode::BasisMismatch, "fewer than n_max one-particle states");
    }
    if (particles.electron[l].channel.particle != Particle::Electron ||
        particles.hole[l].channel.particle != Particle::Hole) {
      throw Error(ErrorCode::BasisMismatch, "electron and hole channels swapped");
    }
  }
}

// Pair densities u_i(r) u_j(r) of the first n columns of two tables, column i*n + j.
Eigen::MatrixXd pair_densities(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int n) {
  Eigen::MatrixXd out(A.rows(), n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.col(i * n + j) = A.col(i).cwiseProduct(B.col(j));
  return out;
}

}  // namespace

OneParticleSet solve_one_particle(std::shared_ptr<const RadialBasis> basis, const Device& device, int l_max,
                                  int n_max, bool include_selfpol, int selfpol_lmax, ImageForm form) {
  OneParticleSet set;
  for (int l = 0; l <= l_max; ++l) {
    for (Particle p : {Particle::Electron, Particle::Hole}) {
      ChannelSpec ch{p, l, include_selfpol, selfpol_lmax, form};
      RadialSolution s = solve_channel(basis, device, ch, n_max);
      (p == Particle::Electron ? set.electron : set.hole).push_back(std::move(s));
    }
  }
  return set;
}

CiMatrices ci_assemble(const OneParticleSet& particles, const Device& device, const CiOptions& options) {
  const int L = options.l_max, n = options.n_max;
  check_particles(particles, L, n);
  const auto basis = particles.electron.front().basis;
  const auto& w = basis->quadrature().weights;
  const Eigen::Map<const Eigen::VectorXd> weights(w.data(), static_cast<Eigen::Index>(w.size()));

  CiMatrices m;
  m.basis = ExcitonBasis::make(L, n);
  const int dim = m.basis.size(), block = n * n;
  m.diagonal.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const PairState& s = m.basis.states[i];
    m.diagonal[i] = particles.electron[s.l].energies[s.n_e] + particles.hole[s.l].energies[s.n_h];
  }
  m.V = Eigen::MatrixXd::Zero(dim, dim);
  if (options.interaction_scale == 0.0) return m;

  // orbital tables; electron channels first, then hole channels, n columns each
  Eigen::MatrixXd coeffs(basis->size(), 2 * (L + 1) * n);
  for (int l = 0; l <= L; ++l) {
    coeffs.middleCols(l * n, n) = particles.electron[l].coefficients.leftCols(n);
    coeffs.middleCols((L + 1 + l) * n, n) = particles.hole[l].coefficients.leftCols(n);
  }

  for (int lambda = 0; lambda <= 2 * L; ++lambda) {
    const MultipoleKernel kernel(device, lambda, options.image_form);
    const PairIntegrator pi(basis, kernel);
    const PairIntegrator::Table t = pi.tabulate(coeffs);
    for (int lb = 0; lb <= L; ++lb) {
      for (int lk = lb; lk <= L; ++lk) {
        const double A = angular_coefficient(lb, lk, lambda);
        if (A == 0.0) continue;
        const auto e_bra = t.nodes.middleCols(lb * n, n), e_ket = t.nodes.middleCols(lk * n, n);
        const auto h_bra = t.nodes.middleCols((L + 1 + lb) * n, n), h_ket = t.nodes.middleCols((L + 1 + lk) * n, n);
        const auto hs_bra = t.split.middleCols((L + 1 + lb) * n, n), hs_ket = t.split.middleCols((L + 1 + lk) * n, n);
        const Eigen::MatrixXd rho_h = pair_densities(h_bra, h_ket, n);
        const Eigen::MatrixXd rho_hs = pair_densities(hs_bra, hs_ket, n);
        Eigen::MatrixXd W(rho_h.rows(), block);
#pragma omp parallel for schedule(static)
        for (int j = 0; j < block; ++j) W.col(j) = pi.potential(rho_h.col(j), rho_hs.col(j));
        const Eigen::MatrixXd rho_e = weights.asDiagonal() * pair_densities(e_bra, e_ket, n);
        // R(e' * n + e, h' * n + h) = int int rho_e'e g rho_h'h
        const Eigen::MatrixXd R = rho_e.transpose() * W;
        auto V = m.V.block(lb * block, lk * block, block, block);
        for (int ep = 0; ep < n; ++ep)
          for (int hp = 0; hp < n; ++hp)
            for (int e = 0; e < n; ++e)
              for (int h = 0; h < n; ++h) V(ep * n + hp, e * n + h) -= A * R(ep * n + e, hp * n + h);
      }
    }
  }
  for (int lb = 0; lb <= L; ++lb) {
    auto D = m.V.block(lb * block, lb * block, block, block);
    const Eigen::MatrixXd sym = 0.5 * (D + D.transpose());
    D = sym;
    for (int lk = lb + 1; lk <= L; ++lk)
      m.V.block(lk * block, lb * block, block, block) = m.V.block(lb * block, lk * block, block, block).transpose();
  }
  m.V *= options.interaction_scale;
  return m;
}

ExcitonSolution ci_solve(const CiMatrices& m, const OneParticleSet& particles) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.H());
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "CI diagonalisation failed");
  ExcitonSolution sol;
  sol.basis = m.basis;
  sol.energies = es.eigenvalues();
  sol.coefficients = es.eigenvectors();
  for (int j = 0; j < sol.coefficients.cols(); ++j) {
    auto c = sol.coefficients.col(j);
    const double cut = 1e-8 * c.cwiseAbs().maxCoeff();
    for (int i = 0; i < c.size(); ++i) {
      if (std::abs(c[i]) > cut) {
        if (c[i] < 0) c = -c;
        break;
      }
    }
  }
  sol.V = m.V;
  sol.particles = particles;
  return sol;
}

double binding_energy(const ExcitonSolution& sol, int state) {
  if (state < 0 || state >= sol.size()) throw Error(ErrorCode::StateOutOfRange, std::to_string(state));
  const auto c = sol.coefficients.col(state);
  return -c.dot(sol.V * c);
}

double perturbative_binding(const OneParticleSet& particles, const Device& device, ImageForm form) {
  check_particles(particles, 0, 1);
  const auto basis = particles.electron.front().basis;
  const PairIntegrator pi(basis, MultipoleKernel(device, 0, form));
  const Eigen::VectorXd e = particles.electron[0].coefficients.col(0);
  const Eigen::VectorXd h = particles.hole[0].coefficients.col(0);
  return pi.integral(e, e, h, h);
}

ExcitonSolution solve_exciton(const Device& device, const Numerics& numerics, double interaction_scale) {
  const auto basis = make_basis(device, numerics);
  const ImageForm form = numerics.printed_exponents ? ImageForm::Printed : ImageForm::Corrected;
  OneParticleSet set = solve_one_particle(basis, device, numerics.l_max, numerics.n_max, numerics.include_selfpol,
                                          numerics.selfpol_lmax, form);
  CiOptions opt;
  opt.l_max = numerics.l_max;
  opt.n_max = numerics.n_max;
  opt.interaction_scale = interaction_scale;
  opt.image_form = form;
  return ci_solve(ci_assemble(set, device, opt), set);
}

double ionization_threshold(const OneParticleSet& particles, const Device& device) {
  check_particles(particles, 0, 1);
  return std::min(device.v0_e + particles.hole[0].energies.front(),
                  device.v0_h + particles.electron[0].energies.front());
}

}  // namespace qdot
