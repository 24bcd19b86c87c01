#include "qdot/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>

#include "qdot/error.hpp"
#include "qdot/simd/kernels.hpp"
#include "qdot/units.hpp"

namespace qdot {

double pair_dipole(const RadialSolution& electron, int n_e, const RadialSolution& hole, int n_h, double mu_bulk) {
  if (electron.basis != hole.basis) throw Error(ErrorCode::BasisMismatch, "electron and hole use different bases");
  if (n_e < 0 || n_e >= electron.size() || n_h < 0 || n_h >= hole.size()) {
    throw Error(ErrorCode::StateOutOfRange, "one-particle state index");
  }
  if (electron.channel.l != hole.channel.l) return 0.0;
  const Eigen::VectorXd ce = electron.coefficients.col(n_e), ch = hole.coefficients.col(n_h);
  return mu_bulk * ce.dot(electron.overlap * ch);
}

DipoleTable dipole_couplings(const ExcitonSolution& sol, const Device& device, double mu_bulk, int n_states) {
  const auto& P = sol.particles;
  const int L = sol.basis.l_max, n = sol.basis.n_max;
  if (static_cast<int>(P.electron.size()) <= L || static_cast<int>(P.hole.size()) <= L) {
    throw Error(ErrorCode::BasisMismatch, "exciton solution lacks its one-particle channels");
  }
  // pair amplitude at coincidence for every CI basis state
  Eigen::VectorXd d(sol.basis.size());
  for (int l = 0; l <= L; ++l) {
    const RadialSolution& e = P.electron[l];
    const RadialSolution& h = P.hole[l];
    if (e.basis != h.basis) throw Error(ErrorCode::BasisMismatch, "electron and hole use different bases");
    const Eigen::MatrixXd O = e.coefficients.leftCols(n).transpose() * e.overlap * h.coefficients.leftCols(n);
    const double ang = (l % 2 == 0 ? 1.0 : -1.0) * std::sqrt(2.0 * l + 1.0);
    for (int ie = 0; ie < n; ++ie)
      for (int ih = 0; ih < n; ++ih) d[sol.basis.index(ie, ih, l)] = ang * O(ie, ih);
  }
  const double threshold = ionization_threshold(P, device);
  DipoleTable t;
  t.mu_bulk = mu_bulk;
  for (int i = 0; i < sol.size() && static_cast<int>(t.M.size()) < n_states; ++i) {
    if (sol.energies[i] >= threshold) break;
    t.M.push_back(mu_bulk * d.dot(sol.coefficients.col(i)));
    t.energies.push_back(sol.energies[i]);
  }
  return t;
}

double resonance_frequency(const ExcitonSolution& sol, double e_gap) {
  if (!(e_gap > 0.0)) throw Error(ErrorCode::InvalidValue, "E_g1 must be positive");
  if (sol.size() == 0) throw Error(ErrorCode::StateOutOfRange, "no exciton states");
  return (sol.energies[0] + e_gap) / units::hbar;
}

DrivenSystem make_system(const DipoleTable& dipoles, double e_gap) {
  DrivenSystem s;
  for (std::size_t i = 0; i < dipoles.M.size(); ++i) {
    s.levels.push_back(dipoles.energies[i] + e_gap);
    s.couplings.push_back(dipoles.M[i]);
  }
  return s;
}

double DriveRun::period() const { return 2.0 * std::numbers::pi / omega; }
double DriveRun::dt() const { return period() / steps_per_period; }
int DriveRun::steps() const {
  const double total = duration > 0.0 ? duration : transient + periods * period();
  return static_cast<int>(std::ceil(total / dt() - 1e-9));
}

namespace {

void check_run(const DrivenSystem& s, const DriveRun& run) {
  if (!(run.E0 >= 0.0)) throw Error(ErrorCode::InvalidValue, "E0 must be >= 0");
  if (!(run.omega > 0.0)) throw Error(ErrorCode::InvalidValue, "omega must be > 0");
  if (run.steps_per_period < 200) throw Error(ErrorCode::InvalidValue, "dt must not exceed T/200");
  if (run.periods < 1 || run.store_every < 1 || run.transient < 0.0) {
    throw Error(ErrorCode::InvalidValue, "periods and store_every must be >= 1, transient >= 0");
  }
  if (s.couplings.size() != s.levels.size()) throw Error(ErrorCode::InvalidValue, "levels and couplings differ in size");
}

// Interaction-picture amplitudes: a_0 for the vacuum, a_i for the excitons,
// phases ph_i = exp(i (w_i - w_0) t).
struct State {
  std::complex<double> a0;
  std::vector<double> re, im;
};

class Rk4 {
 public:
  Rk4(const DrivenSystem& s, const DriveRun& run)
      : n_(s.levels.size()), M_(s.couplings), E0_(run.E0), omega_(run.omega), h_(run.dt()), K_(simd::kernels()) {
    w_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) w_[i] = (s.levels[i] - s.vacuum_energy) / units::hbar;
    half_re_.resize(n_);
    half_im_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      half_re_[i] = std::cos(0.5 * h_ * w_[i]);
      half_im_[i] = std::sin(0.5 * h_ * w_[i]);
    }
    for (auto* v : {&ph_re_, &ph_im_, &mid_re_, &mid_im_, &end_re_, &end_im_, &tmp_re_, &tmp_im_, &acc_re_, &acc_im_,
                    &k_re_, &k_im_})
      v->resize(n_);
  }

  void set_phases(int step) {
    const double t = step * h_;
    for (std::size_t i = 0; i < n_; ++i) {
      ph_re_[i] = std::cos(w_[i] * t);
      ph_im_[i] = std::sin(w_[i] * t);
    }
  }

  // One step from t = step * h; phases must hold exp(i w t) on entry and are
  // advanced to t + h on exit.
  void step(int step, State& s) {
    const double t = step * h_;
    mid_re_ = ph_re_;
    mid_im_ = ph_im_;
    K_.rotate(mid_re_.data(), mid_im_.data(), half_re_.data(), half_im_.data(), n_);
    end_re_ = mid_re_;
    end_im_ = mid_im_;
    K_.rotate(end_re_.data(), end_im_.data(), half_re_.data(), half_im_.data(), n_);

    std::complex<double> k0;
    acc_re_.assign(n_, 0.0);
    acc_im_.assign(n_, 0.0);
    std::complex<double> acc0 = 0.0;

    // k1
    derivative(t, ph_re_, ph_im_, s.a0, s.re, s.im, k0);
    accumulate(1.0, k0, acc0);
    stage(s, 0.5 * h_, k0);
    // k2
    derivative(t + 0.5 * h_, mid_re_, mid_im_, stage_a0_, tmp_re_, tmp_im_, k0);
    accumulate(2.0, k0, acc0);
    stage(s, 0.5 * h_, k0);
    // k3
    derivative(t + 0.5 * h_, mid_re_, mid_im_, stage_a0_, tmp_re_, tmp_im_, k0);
    accumulate(2.0, k0, acc0);
    stage(s, h_, k0);
    // k4
    derivative(t + h_, end_re_, end_im_, stage_a0_, tmp_re_, tmp_im_, k0);
    accumulate(1.0, k0, acc0);

    const double f = h_ / 6.0;
    s.a0 += f * acc0;
    K_.axpy(f, acc_re_.data(), s.re.data(), s.re.data(), n_);
    K_.axpy(f, acc_im_.data(), s.im.data(), s.im.data(), n_);
    ph_re_.swap(end_re_);
    ph_im_.swap(end_im_);
  }

  const std::vector<double>& ph_re() const { return ph_re_; }
  const std::vector<double>& ph_im() const { return ph_im_; }

 private:
  // da_0/dt = (i/hbar) E(t) sum_i M_i conj(ph_i) a_i, da_i/dt = (i/hbar) E(t) M_i ph_i a_0
  void derivative(double t, const std::vector<double>& pr, const std::vector<double>& pi, std::complex<double> a0,
                  const std::vector<double>& re, const std::vector<double>& im, std::complex<double>& k0) {
    const double field = E0_ * std::sin(omega_ * t) / units::hbar;
    const simd::ComplexSum sum = K_.star_reduce(M_.data(), pr.data(), pi.data(), re.data(), im.data(), n_);
    k0 = std::complex<double>(0.0, field) * std::complex<double>(sum.re, sum.im);
    const std::complex<double> z = std::complex<double>(0.0, field) * a0;
    K_.star_scatter(M_.data(), pr.data(), pi.data(), z.real(), z.imag(), k_re_.data(), k_im_.data(), n_);
  }

  void accumulate(double c, std::complex<double> k0, std::complex<double>& acc0) {
    acc0 += c * k0;
    K_.axpy(c, k_re_.data(), acc_re_.data(), acc_re_.data(), n_);
    K_.axpy(c, k_im_.data(), acc_im_.data(), acc_im_.data(), n_);
  }

  // stage state = s + c * k
  void stage(const State& s, double c, std::complex<double> k0) {
    stage_a0_ = s.a0 + c * k0;
    K_.axpy(c, k_re_.data(), s.re.data(), tmp_re_.data(), n_);
    K_.axpy(c, k_im_.data(), s.im.data(), tmp_im_.data(), n_);
  }

  std::size_t n_;
  std::vector<double> M_, w_, half_re_, half_im_;
  double E0_, omega_, h_;
  const simd::KernelTable& K_;
  std::vector<double> ph_re_, ph_im_, mid_re_, mid_im_, end_re_, end_im_, tmp_re_, tmp_im_, acc_re_, acc_im_, k_re_,
      k_im_;
  std::complex<double> stage_a0_;
};

}  // namespace

TimeSeries evolve(const DrivenSystem& system, const DriveRun& run) {
  check_run(system, run);
  const int steps = run.steps();
  const std::size_t n = system.levels.size();
  const double h = run.dt();
  const double w0 = system.vacuum_energy / units::hbar;
  Rk4 rk(system, run);
  rk.set_phases(0);
  State s{1.0, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

  TimeSeries out;
  const int stored = steps / run.store_every + 1;
  out.t.reserve(static_cast<std::size_t>(stored));
  out.U.resize(stored, static_cast<Eigen::Index>(n + 1));
  int row = 0;
  const auto record = [&](int step) {
    const double t = step * h;
    const std::complex<double> g = std::polar(1.0, -w0 * t);
    out.t.push_back(t);
    out.U(row, 0) = g * s.a0;
    for (std::size_t i = 0; i < n; ++i) {
      // U_i = exp(-i w_i t) a_i = exp(-i w_0 t) conj(ph_i) a_i
      const std::complex<double> ph(rk.ph_re()[i], -rk.ph_im()[i]);
      out.U(row, static_cast<Eigen::Index>(i + 1)) = g * ph * std::complex<double>(s.re[i], s.im[i]);
    }
    ++row;
  };
  record(0);
  constexpr int refresh = 64;  // exact phases every few steps bound the rounding of repeated rotations
  for (int k = 0; k < steps; ++k) {
    rk.step(k, s);
    if ((k + 1) % refresh == 0) rk.set_phases(k + 1);
    double norm = std::norm(s.a0);
    for (std::size_t i = 0; i < n; ++i) norm += s.re[i] * s.re[i] + s.im[i] * s.im[i];
    const double err = std::abs(norm - 1.0);
    out.max_norm_error = std::max(out.max_norm_error, err);
    if (err > 1e-6) {
      throw Error(ErrorCode::NormDrift, "norm error " + std::to_string(err) + " at t = " + std::to_string((k + 1) * h) +
                                            " fs; reduce dt");
    }
    if ((k + 1) % run.store_every == 0) record(k + 1);
  }
  out.U.conservativeResize(row, Eigen::NoChange);
  return out;
}

namespace {

double average_leakage(const TimeSeries& s, double t0, double t1) {
  const Eigen::Index levels = s.U.cols();
  const auto outside = [&](std::size_t k) {
    const auto r = static_cast<Eigen::Index>(k);
    double p = 1.0 - std::norm(s.U(r, 0));
    if (levels > 1) p -= std::norm(s.U(r, 1));
    return p;
  };
  const double eps = 1e-9 * (s.t.size() > 1 ? s.t[1] - s.t[0] : 1.0);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < s.t.size(); ++k) {
    if (s.t[k] < t0 - eps || s.t[k + 1] > t1 + eps) continue;
    sum += 0.5 * (s.t[k + 1] - s.t[k]) * (outside(k) + outside(k + 1));
  }
  return sum / (t1 - t0);
}

}  // namespace

Leakage leakage(const TimeSeries& series, const DriveRun& run) {
  const double T = run.period();
  const double t0 = run.transient, t1 = run.transient + run.periods * T;
  if (series.t.empty() || series.t.back() < t1 - 1e-9 * T) {
    throw Error(ErrorCode::TooShort, "series ends before t' + nT");
  }
  Leakage L;
  L.value = average_leakage(series, t0, t1);
  const int half = std::max(1, run.periods / 2);
  L.delta = std::abs(L.value - average_leakage(series, t0, t0 + half * T));
  return L;
}

std::vector<ScanPoint> leakage_scan(const DrivenSystem& system, const std::vector<double>& E0,
                                    const std::vector<double>& omega, const DriveRun& base) {
  if (E0.empty() || omega.empty()) throw Error(ErrorCode::InvalidValue, "scan grids must be nonempty");
  const int n = static_cast<int>(E0.size() * omega.size());
  std::vector<ScanPoint> out(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    try {
      DriveRun run = base;
      run.E0 = E0[static_cast<std::size_t>(k) / omega.size()];
      run.omega = omega[static_cast<std::size_t>(k) % omega.size()];
      run.duration = 0.0;
      const Leakage L = leakage(evolve(system, run), run);
      out[static_cast<std::size_t>(k)] = {run.E0, run.omega, L.value, L.delta};
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double first_transfer_time(const TimeSeries& series, const DriveRun& run, int level) {
  if (level < 0 || level >= series.U.cols()) throw Error(ErrorCode::StateOutOfRange, std::to_string(level));
  const double T = run.period();
  const Eigen::VectorXd p = series.probability(level);
  std::vector<double> avg, mid;
  std::size_t k = 0;
  for (double start = 0.0; start + T <= series.t.back() + 1e-9 * T; start += T) {
    double s = 0.0;
    int c = 0;
    while (k < series.t.size() && series.t[k] < start + T - 1e-9 * T) {
      s += p[static_cast<Eigen::Index>(k)];
      ++c;
      ++k;
    }
    if (c == 0) break;
    avg.push_back(s / c);
    mid.push_back(start + 0.5 * T);
  }
  if (avg.size() < 3) return -1.0;
  const double top = *std::max_element(avg.begin(), avg.end());
  for (std::size_t i = 1; i + 1 < avg.size(); ++i) {
    if (avg[i] >= 0.5 * top && avg[i] >= avg[i - 1] && avg[i] > avg[i + 1]) return mid[i];
  }
  return -1.0;
}

}  // namespace qdot
