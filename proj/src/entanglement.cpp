#include "qdot/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>

#include "qdot/error.hpp"

namespace qdot {

std::vector<OrbitalIndex> orbital_layout(int l_max, int n_max) {
  std::vector<OrbitalIndex> out;
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m)
      for (int n = 0; n < n_max; ++n) out.push_back({n, l, m});
  return out;
}

namespace {

int orbital_offset(int l, int m, int n_max) { return n_max * (l * l + m + l); }

void check_state(const ExcitonSolution& sol, int state) {
  if (state < 0 || state >= sol.size()) throw Error(ErrorCode::StateOutOfRange, std::to_string(state));
}

SchmidtSpectrum finish(std::vector<double> lambdas) {
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  SchmidtSpectrum s;
  for (double x : lambdas)
    if (x > 0.0) s.entropy -= x * std::log(x);
  s.entropy = std::max(s.entropy, 0.0);
  s.lambdas = std::move(lambdas);
  return s;
}

}  // namespace

Eigen::MatrixXd coefficient_matrix(const ExcitonSolution& sol, int state) {
  check_state(sol, state);
  const int L = sol.basis.l_max, n = sol.basis.n_max;
  const int dim = n * (L + 1) * (L + 1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim, dim);
  const auto c = sol.coefficients.col(state);
  for (int i = 0; i < sol.basis.size(); ++i) {
    const PairState& s = sol.basis.states[i];
    const double norm = 1.0 / std::sqrt(2.0 * s.l + 1.0);
    for (int m = -s.l; m <= s.l; ++m) {
      const double cg = ((s.l - m) % 2 == 0 ? 1.0 : -1.0) * norm;
      C(orbital_offset(s.l, m, n) + s.n_e, orbital_offset(s.l, -m, n) + s.n_h) = cg * c[i];
    }
  }
  return C;
}

SchmidtSpectrum entropy(const Eigen::MatrixXd& C) {
  const double norm = C.norm();
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    throw Error(ErrorCode::NotNormalized, "Frobenius norm " + std::to_string(norm));
  }
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(C).singularValues();
  std::vector<double> lambdas(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) lambdas[static_cast<std::size_t>(i)] = s[i] * s[i];
  return finish(std::move(lambdas));
}

SchmidtSpectrum state_entropy(const ExcitonSolution& sol, int state) {
  check_state(sol, state);
  const int L = sol.basis.l_max, n = sol.basis.n_max;
  const auto c = sol.coefficients.col(state);
  if (!(std::abs(c.norm() - 1.0) <= 1e-10)) throw Error(ErrorCode::NotNormalized, "CI vector not normalised");
  std::vector<double> lambdas;
  for (int l = 0; l <= L; ++l) {
    const Eigen::Map<const Eigen::MatrixXd> block(c.data() + sol.basis.index(0, 0, l), n, n);
    // block(h, e) in column-major storage; singular values do not care
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      for (int k = 0; k < 2 * l + 1; ++k) lambdas.push_back(s[i] * s[i] / (2 * l + 1));
  }
  return finish(std::move(lambdas));
}

std::vector<EntropyRow> entropy_scan(const Device& device, const Numerics& numerics,
                                     const std::vector<double>& a_over_b, int states, double interaction_scale) {
  for (double x : a_over_b) {
    if (!(x > 0.0 && x < 1.0)) throw Error(ErrorCode::InvalidValue, "a/b must lie in (0, 1)");
  }
  std::vector<std::vector<EntropyRow>> per_point(a_over_b.size());
  const int np = static_cast<int>(a_over_b.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < np; ++p) {
    try {
      const double ratio = a_over_b[static_cast<std::size_t>(p)];
      const Device d = device.with_radii(ratio * device.b, device.b, device.R);
      const ExcitonSolution sol = solve_exciton(d, numerics, interaction_scale);
      const int k = std::min(states, sol.size());
      for (int s = 0; s < k; ++s) {
        per_point[static_cast<std::size_t>(p)].push_back(
            {ratio, s, sol.energies[s], binding_energy(sol, s), state_entropy(sol, s).entropy});
      }
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<EntropyRow> rows;
  for (auto& v : per_point) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

}  // namespace qdot
