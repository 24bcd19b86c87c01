#include "qdot/radial.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qdot/error.hpp"
#include "qdot/units.hpp"

namespace qdot {

int RadialSolution::bound_count() const {
  int n = 0;
  for (double e : energies) n += e < barrier ? 1 : 0;
  return n;
}

Eigen::VectorXd RadialSolution::on_nodes(int state) const {
  if (state < 0 || state >= size()) throw Error(ErrorCode::StateOutOfRange, std::to_string(state));
  return basis->values() * coefficients.col(state);
}

RadialMatrices assemble_on_nodes(const RadialBasis& basis, std::span<const double> inv_mass,
                                 std::span<const double> potential, int l) {
  const QuadratureTable& q = basis.quadrature();
  const auto nq = static_cast<std::size_t>(q.size());
  if (inv_mass.size() != nq || potential.size() != nq) {
    throw Error(ErrorCode::InconsistentGeometry, "node tables do not match the quadrature");
  }
  if (l < 0) throw Error(ErrorCode::InvalidValue, "l must be >= 0");
  const double c = units::hbar2_over_2m0;
  const double ll = l * (l + 1.0);

  Eigen::ArrayXd r = Eigen::Map<const Eigen::ArrayXd>(q.nodes.data(), q.size());
  Eigen::ArrayXd w = Eigen::Map<const Eigen::ArrayXd>(q.weights.data(), q.size());
  Eigen::ArrayXd im = Eigen::Map<const Eigen::ArrayXd>(inv_mass.data(), q.size());
  Eigen::ArrayXd v = Eigen::Map<const Eigen::ArrayXd>(potential.data(), q.size());

  const Eigen::MatrixXd& U = basis.values();
  // d/dr (u/r) * r = u' - u/r
  const Eigen::MatrixXd G = basis.derivs() - (r.inverse()).matrix().asDiagonal() * U;

  const Eigen::VectorXd wk = (w * c * im).matrix();
  const Eigen::VectorXd wp = (w * (c * ll * im / (r * r) + v)).matrix();
  const Eigen::VectorXd ws = w.matrix();

  RadialMatrices m;
  m.H = G.transpose() * wk.asDiagonal() * G + U.transpose() * wp.asDiagonal() * U;
  m.S = U.transpose() * ws.asDiagonal() * U;
  m.H = 0.5 * (m.H + m.H.transpose()).eval();
  m.S = 0.5 * (m.S + m.S.transpose()).eval();
  return m;
}

namespace {

void check_geometry(const RadialBasis& basis, const Device& device) {
  const KnotVector& kv = basis.knots();
  const bool ok = kv.lo() == 0.0 && kv.hi() == device.R && kv.multiplicity_of(device.b) > 0 &&
                  (device.a == 0.0 || kv.multiplicity_of(device.a) > 0);
  if (!ok) throw Error(ErrorCode::InconsistentGeometry, "basis knots do not match the device radii");
}

}  // namespace

RadialMatrices assemble(const RadialBasis& basis, const Device& device, const ChannelSpec& channel) {
  check_geometry(basis, device);
  const QuadratureTable& q = basis.quadrature();
  std::vector<double> inv_mass(q.nodes.size()), potential(q.nodes.size());
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const Region reg = device.region(q.nodes[i]);
    inv_mass[i] = 1.0 / device.mass(channel.particle, reg);
    potential[i] = device.potential(channel.particle, reg);
  }
  if (channel.include_selfpol) {
    const SelfPolarization vs(device, channel.selfpol_lmax, channel.image_form);
    std::vector<double> extra(q.nodes.size());
    vs.evaluate(q.nodes, extra);
    for (std::size_t i = 0; i < extra.size(); ++i) potential[i] += extra[i];
  }
  return assemble_on_nodes(basis, inv_mass, potential, channel.l);
}

RadialSolution solve(const RadialMatrices& m, int n_states) {
  const auto n = m.H.rows();
  if (m.H.cols() != n || m.S.rows() != n || m.S.cols() != n) {
    throw Error(ErrorCode::SolverFailure, "H and S must be square and of equal size");
  }
  if (n_states < 1 || n_states > n) n_states = static_cast<int>(n);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(m.H, m.S, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "generalised eigensolver did not converge");

  RadialSolution sol;
  sol.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_states);
  sol.coefficients = es.eigenvectors().leftCols(n_states);
  sol.overlap = m.S;
  for (int j = 0; j < n_states; ++j) {
    auto col = sol.coefficients.col(j);
    const double tol = 1e-8 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > tol) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
  return sol;
}

std::shared_ptr<const RadialBasis> make_basis(const Device& device, const Numerics& numerics) {
  return std::make_shared<const RadialBasis>(
      build_knots(device, numerics.order, numerics.intervals, numerics.multiplicity()), numerics.points());
}

RadialSolution solve_channel(std::shared_ptr<const RadialBasis> basis, const Device& device,
                             const ChannelSpec& channel, int n_states) {
  RadialSolution sol = solve(assemble(*basis, device, channel), n_states);
  sol.channel = channel;
  sol.basis = std::move(basis);
  sol.barrier = device.offset(channel.particle);
  return sol;
}

MatchingResidual matching_residual(const RadialSolution& solution, const Device& device, int state) {
  if (state < 0 || state >= solution.size()) throw Error(ErrorCode::StateOutOfRange, std::to_string(state));
  const Eigen::VectorXd c = solution.coefficients.col(state);
  const RadialBasis& basis = *solution.basis;
  const Particle p = solution.channel.particle;

  auto jumps = [&](double x, double m_in, double m_out, double& psi_jump, double& flux_jump) {
    const double ul = basis.function(c, x, -1), ur = basis.function(c, x, +1);
    const double dl = basis.derivative(c, x, -1), dr = basis.derivative(c, x, +1);
    const double psil = ul / x, psir = ur / x;
    const double gl = dl / x - ul / (x * x), gr = dr / x - ur / (x * x);
    psi_jump = psir - psil;
    flux_jump = gr / m_out - gl / m_in;
  };
  MatchingResidual res;
  const double mw = device.mass(p, Region::Well), mb = device.mass(p, Region::Clad);
  if (device.a > 0.0) jumps(device.a, mb, mw, res.psi_a, res.flux_a);
  jumps(device.b, mw, mb, res.psi_b, res.flux_b);
  return res;
}

double infinite_well_reference(const Device& device, double m_well, int l, int n) {
  if (n < 1 || l < 0) throw Error(ErrorCode::InvalidValue, "need n >= 1 and l >= 0");
  const double a = device.a, b = device.b;
  const double c = units::hbar2_over_2m0 / m_well;
  if (l == 0) {
    const double k = n * std::numbers::pi / (b - a);
    return c * k * k;
  }
  auto f = [&](double k) {
    if (a == 0.0) return std::sph_bessel(l, k * b);
    return std::sph_bessel(l, k * a) * std::sph_neumann(l, k * b) -
           std::sph_bessel(l, k * b) * std::sph_neumann(l, k * a);
  };
  // Roots of the cross product are separated by roughly pi/(b-a); scan with a
  // fine step so none is skipped.
  const double step = std::numbers::pi / (b - a) / 64.0;
  const int max_steps = 64 * (n + l + 4) * 4;
  try {
    double k0 = step * 1e-3, f0 = f(k0);
    int found = 0;
    for (int s = 1; s <= max_steps; ++s) {
      const double k1 = s * step;
      const double f1 = f(k1);
      if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
        if (++found == n) {
          std::uintmax_t iters = 200;
          auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 1e-15 * std::abs(hi); };
          const auto [lo, hi] = boost::math::tools::toms748_solve(f, k0, k1, f0, f1, tol, iters);
          const double k = 0.5 * (lo + hi);
          return c * k * k;
        }
      }
      k0 = k1;
      f0 = f1;
    }
  } catch (const std::domain_error&) {
    // special functions out of range or a sign change that is not a root
  } catch (const boost::math::evaluation_error&) {
  }
  throw Error(ErrorCode::RootNotBracketed, "l = " + std::to_string(l) + ", n = " + std::to_string(n));
}

}  // namespace qdot
