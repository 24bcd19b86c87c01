#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "csv.hpp"
#include "qdot/dynamics.hpp"
#include "qdot/entanglement.hpp"
#include "qdot/error.hpp"
#include "qdot/radial.hpp"
#include "qdot/units.hpp"

namespace qdot::cli {
namespace {

// Errors raised while reading input are config errors; everything after is a solver error.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorCode::InvalidValue, "not a number: '" + s + "'");
  return v;
}

struct Setup {
  Device device;  // with --no-polarization applied
  Numerics numerics;
  ImageForm form = ImageForm::Corrected;
};

Setup effective(const Options& opt, const Config& cfg) {
  Setup s{cfg.device, cfg.numerics};
  if (opt.no_selfpol) s.numerics.include_selfpol = false;
  if (opt.printed_eqs) s.numerics.printed_exponents = true;
  if (opt.no_polarization) s.device = s.device.without_dielectric_mismatch();
  s.form = s.numerics.printed_exponents ? ImageForm::Printed : ImageForm::Corrected;
  return s;
}

std::string grid_text(const std::vector<double>& g) {
  std::string t;
  for (std::size_t i = 0; i < g.size(); ++i) t += (i ? "," : "") + num(g[i]);
  return t;
}

std::vector<std::string> manifest(const Options& opt, const Config& cfg, const Setup& s,
                                  const std::vector<std::string>& extra) {
  const Device& d = cfg.device;
  const Numerics& n = s.numerics;
  std::vector<std::string> m;
  m.push_back("qdot " + opt.command);
  m.push_back("config: " + opt.config.string());
  m.push_back(fmt::format("device: a_nm={} b_nm={} R_nm={} V0_e_eV={} V0_h_eV={} E_gap_eV={}", num(d.a), num(d.b),
                          num(d.R), num(d.v0_e), num(d.v0_h), num(d.well.e_gap.value_or(0.0))));
  m.push_back(fmt::format("well: {} m_e={} m_h={} eps={}", d.well.name, num(d.well.m_e), num(d.well.m_h),
                          num(d.well.eps)));
  m.push_back(fmt::format("barrier: {} m_e={} m_h={} eps={}", d.barrier.name, num(d.barrier.m_e),
                          num(d.barrier.m_h), num(d.barrier.eps)));
  m.push_back(fmt::format("numerics: order={} intervals={} interface_multiplicity={} quad_points={} n_max={} "
                          "l_max={} selfpol_lmax={}",
                          n.order, n.intervals, n.multiplicity(), n.points(), n.n_max, n.l_max, n.selfpol_lmax));
  m.push_back(fmt::format("physics: selfpol={} polarization={} image_form={}", n.include_selfpol ? "on" : "off",
                          opt.no_polarization ? "off" : "on", n.printed_exponents ? "printed" : "corrected"));
  for (const auto& e : extra) m.push_back(e);
  m.push_back("seed: none");
  return m;
}

template <class Row, class F>
std::vector<Row> parallel_rows(int n, F&& body) {
  std::vector<std::vector<Row>> parts(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      parts[static_cast<std::size_t>(i)] = body(i);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Row> rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

std::vector<double> ratio_grid(const Options& opt, const std::string& fallback) {
  const std::vector<double> g = parse_grid(opt.ab_grid.empty() ? fallback : opt.ab_grid);
  for (double x : g)
    if (!(x >= 0.0 && x < 1.0)) throw Error(ErrorCode::InvalidValue, "a/b must lie in [0, 1)");
  return g;
}

// ---------------------------------------------------------------- solve-one

struct LevelRow {
  double ratio;
  std::string particle;
  int l, n;
  double E, E_nosp, E_inf;
  bool bound;
};

void solve_one(const Options& opt, const Config& cfg, const Setup& s) {
  const std::vector<double> grid = ratio_grid(opt, "0.1:0.9:9");
  const int states = opt.states.value_or(3);
  if (states < 1) throw InputError("--states must be >= 1");
  const auto rows = parallel_rows<LevelRow>(static_cast<int>(grid.size()), [&](int i) {
    const double ratio = grid[static_cast<std::size_t>(i)];
    const Device d = s.device.with_radii(ratio * s.device.b, s.device.b, s.device.R);
    const auto basis = make_basis(d, s.numerics);
    std::vector<LevelRow> out;
    for (Particle p : {Particle::Electron, Particle::Hole}) {
      for (int l = 0; l <= s.numerics.l_max; ++l) {
        ChannelSpec ch{p, l, s.numerics.include_selfpol, s.numerics.selfpol_lmax, s.form};
        const RadialSolution on = solve_channel(basis, d, ch, states);
        ch.include_selfpol = false;
        const RadialSolution off = solve_channel(basis, d, ch, states);
        const double m_well = d.mass(p, Region::Well);
        for (int n = 0; n < states; ++n) {
          out.push_back({ratio, p == Particle::Electron ? "e" : "h", l, n + 1, on.energies[n], off.energies[n],
                         infinite_well_reference(d, m_well, l, n + 1), on.bound(n)});
        }
      }
    }
    return out;
  });
  CsvFile f(opt.out / "levels.csv",
            manifest(opt, cfg, s, {"a_over_b: " + grid_text(grid), fmt::format("states: {}", states)}),
            {"a_over_b[1]", "particle[-]", "l[1]", "n[1]", "E[eV]", "E_noselfpol[eV]", "E_infinite[eV]",
             "selfpol_shift_rel[1]", "bound[1]"});
  for (const auto& r : rows) {
    f << r.ratio << r.particle << r.l << r.n << r.E << r.E_nosp << r.E_inf << (r.E - r.E_nosp) / r.E_nosp
      << (r.bound ? 1 : 0);
    f.end_row();
  }
}

// ---------------------------------------------------------------- exciton

struct StateRow {
  double ratio;
  int state;
  double energy, binding, entropy;
};

struct MethodRow {
  double ratio;
  double ci_sp, ci_nosp, pt_sp, pt_nosp, ci_nopol, pt_nopol;
};

void exciton(const Options& opt, const Config& cfg, const Setup& s) {
  const std::vector<double> grid = ratio_grid(opt, "0.1:0.9:9");
  const int states = opt.states.value_or(5);
  if (states < 1) throw InputError("--states must be >= 1");
  for (double x : grid)
    if (x <= 0.0) throw InputError("a/b must lie in (0, 1) for the exciton scan");
  const int np = static_cast<int>(grid.size());
  const auto rows = parallel_rows<StateRow>(np, [&](int i) {
    const double ratio = grid[static_cast<std::size_t>(i)];
    const Device d = s.device.with_radii(ratio * s.device.b, s.device.b, s.device.R);
    const ExcitonSolution sol = solve_exciton(d, s.numerics);
    std::vector<StateRow> out;
    for (int k = 0; k < std::min(states, sol.size()); ++k)
      out.push_back({ratio, k, sol.energies[k], binding_energy(sol, k), state_entropy(sol, k).entropy});
    return out;
  });
  // method comparison always uses the full dielectric structure
  const auto methods = parallel_rows<MethodRow>(np, [&](int i) {
    const double ratio = grid[static_cast<std::size_t>(i)];
    const Device d = cfg.device.with_radii(ratio * cfg.device.b, cfg.device.b, cfg.device.R);
    const Device flat = d.without_dielectric_mismatch();
    Numerics sp = s.numerics, nosp = s.numerics;
    sp.include_selfpol = true;
    nosp.include_selfpol = false;
    const ExcitonSolution a = solve_exciton(d, sp), b = solve_exciton(d, nosp), c = solve_exciton(flat, nosp);
    return std::vector<MethodRow>{{ratio, binding_energy(a, 0), binding_energy(b, 0),
                                   perturbative_binding(a.particles, d, s.form),
                                   perturbative_binding(b.particles, d, s.form), binding_energy(c, 0),
                                   perturbative_binding(c.particles, flat, s.form)}};
  });
  const auto m = manifest(opt, cfg, s, {"a_over_b: " + grid_text(grid), fmt::format("states: {}", states)});
  CsvFile f(opt.out / "exciton.csv", m,
            {"a_over_b[1]", "state_index[1]", "energy[eV]", "binding[eV]", "entropy[nats]"});
  for (const auto& r : rows) {
    f << r.ratio << r.state << r.energy << r.binding << r.entropy;
    f.end_row();
  }
  CsvFile g(opt.out / "methods.csv", m,
            {"a_over_b[1]", "B_ci_selfpol[eV]", "B_ci_noselfpol[eV]", "B_pt_selfpol[eV]", "B_pt_noselfpol[eV]",
             "B_ci_nopol[eV]", "B_pt_nopol[eV]"});
  for (const auto& r : methods) {
    g << r.ratio << r.ci_sp << r.ci_nosp << r.pt_sp << r.pt_nosp << r.ci_nopol << r.pt_nopol;
    g.end_row();
  }
}

// ---------------------------------------------------------------- dynamics

struct Driven {
  Device device;
  ExcitonSolution sol;
  DrivenSystem system;
  double omega_res = 0.0;
};

Driven driven(const Options& opt, const Config& cfg, const Setup& s) {
  Device d = s.device;
  if (!opt.ab_grid.empty()) {
    const auto g = ratio_grid(opt, "");
    if (g.size() != 1) throw InputError("dynamics runs take a single a/b value");
    d = d.with_radii(g[0] * d.b, d.b, d.R);
  }
  const int states = opt.states.value_or(cfg.drive.n_states);
  if (states < 1) throw InputError("--states must be >= 1");
  const double gap = d.well.e_gap.value_or(0.0);
  Driven out{d, solve_exciton(d, s.numerics), {}, 0.0};
  out.system = make_system(dipole_couplings(out.sol, d, cfg.drive.mu_bulk, states), gap);
  out.omega_res = resonance_frequency(out.sol, gap);
  return out;
}

std::vector<std::string> drive_lines(const Config& cfg, const Driven& dv, int periods) {
  return {fmt::format("drive: mu_bulk_e_nm={} periods={} steps_per_period={} transient_fs={} omega_res_rad_per_fs={}",
                      num(cfg.drive.mu_bulk), periods, cfg.drive.steps_per_period, num(cfg.drive.transient),
                      num(dv.omega_res)),
          fmt::format("structure: a_nm={} bound_states={}", num(dv.device.a), dv.system.levels.size())};
}

void dynamics(const Options& opt, const Config& cfg, const Setup& s) {
  const std::vector<double> E0s = opt.E0.empty() ? std::vector<double>{1e-3, 1e-2, 5e-2} : parse_grid(opt.E0, true);
  const double rel = opt.omega_rel.empty() ? cfg.drive.omega_rel : parse_grid(opt.omega_rel).at(0);
  const int periods = opt.periods.value_or(cfg.drive.periods);
  if (periods < 1) throw InputError("--periods must be >= 1");
  const Driven dv = driven(opt, cfg, s);
  if (dv.system.levels.empty()) throw Error(ErrorCode::StateOutOfRange, "no bound exciton state");
  const double M1 = std::abs(dv.system.couplings[0]);

  std::vector<DriveRun> runs;
  for (double E0 : E0s) {
    DriveRun r;
    r.E0 = E0;
    r.omega = rel * dv.omega_res;
    r.periods = periods;
    r.steps_per_period = cfg.drive.steps_per_period;
    r.transient = cfg.drive.transient;
    // long enough for the first complete transfer into the ground exciton
    const double transfer = (E0 > 0.0 && M1 > 0.0) ? std::numbers::pi * units::hbar / (M1 * E0) : 0.0;
    r.duration = std::max(r.transient + periods * r.period(), 2.5 * transfer);
    r.store_every = opt.store_every.value_or(std::max(1, r.steps() / 2000));
    runs.push_back(r);
  }
  const int nr = static_cast<int>(runs.size());
  std::vector<TimeSeries> series(runs.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nr; ++i) {
    try {
      series[static_cast<std::size_t>(i)] = evolve(dv.system, runs[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  auto lines = drive_lines(cfg, dv, periods);
  lines.push_back("E0_V_per_nm: " + grid_text(E0s));
  lines.push_back("omega_rel: " + num(rel));
  const auto m = manifest(opt, cfg, s, lines);
  {
    CsvFile f(opt.out / "drive_levels.csv", m, {"state_index[1]", "energy[eV]", "coupling[e_nm]"});
    f << 0 << dv.system.vacuum_energy << 0.0;
    f.end_row();
    for (std::size_t i = 0; i < dv.system.levels.size(); ++i) {
      f << static_cast<int>(i + 1) << dv.system.levels[i] << dv.system.couplings[i];
      f.end_row();
    }
  }
  {
    CsvFile f(opt.out / "trajectory.csv", m,
              {"E0[V_per_nm]", "t[fs]", "state_index[1]", "reU[1]", "imU[1]", "prob[1]"});
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const TimeSeries& ts = series[i];
      for (std::size_t k = 0; k < ts.t.size(); ++k)
        for (Eigen::Index j = 0; j < ts.U.cols(); ++j) {
          const auto u = ts.U(static_cast<Eigen::Index>(k), j);
          f << runs[i].E0 << ts.t[k] << static_cast<int>(j) << u.real() << u.imag() << std::norm(u);
          f.end_row();
        }
    }
  }
  CsvFile f(opt.out / "dynamics.csv", m,
            {"E0[V_per_nm]", "omega[rad_per_fs]", "first_transfer[fs]", "leakage[1]", "convergence_delta[1]",
             "max_norm_error[1]"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double tt = first_transfer_time(series[i], runs[i]);
    const Leakage L = leakage(series[i], runs[i]);
    f << runs[i].E0 << runs[i].omega << (tt < 0.0 ? std::nan("") : tt) << L.value << L.delta
      << series[i].max_norm_error;
    f.end_row();
  }
}

// ---------------------------------------------------------------- leakage-scan

void leakage_scan_cmd(const Options& opt, const Config& cfg, const Setup& s) {
  const std::vector<double> E0s =
      parse_grid(opt.E0.empty() ? std::string("1e-3,2e-3,5e-3,1e-2,2e-2,5e-2") : opt.E0, true);
  const std::vector<double> rels = parse_grid(opt.omega_rel.empty() ? std::string("0.8:1.2:41") : opt.omega_rel);
  const int periods = opt.periods.value_or(cfg.drive.periods);
  if (periods < 1) throw InputError("--periods must be >= 1");
  const Driven dv = driven(opt, cfg, s);
  std::vector<double> omegas;
  for (double r : rels) omegas.push_back(r * dv.omega_res);
  DriveRun base;
  base.periods = periods;
  base.steps_per_period = cfg.drive.steps_per_period;
  base.transient = cfg.drive.transient;
  base.store_every = 1;
  const auto scan = leakage_scan(dv.system, E0s, omegas, base);

  auto lines = drive_lines(cfg, dv, periods);
  lines.push_back("E0_V_per_nm: " + grid_text(E0s));
  lines.push_back("omega_rel: " + grid_text(rels));
  const auto m = manifest(opt, cfg, s, lines);
  {
    CsvFile f(opt.out / "scan.csv", m,
              {"E0[V_per_nm]", "omega_rel[1]", "omega[rad_per_fs]", "leakage[1]", "convergence_delta[1]"});
    for (std::size_t k = 0; k < scan.size(); ++k) {
      f << scan[k].E0 << rels[k % rels.size()] << scan[k].omega << scan[k].leakage << scan[k].delta;
      f.end_row();
    }
  }
  // log L against log E0 at every frequency
  CsvFile f(opt.out / "loglog_fit.csv", m, {"omega_rel[1]", "slope[1]", "r2[1]", "points[1]"});
  for (std::size_t j = 0; j < rels.size(); ++j) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < E0s.size(); ++i) {
      const ScanPoint& p = scan[i * rels.size() + j];
      if (p.E0 > 0.0 && p.leakage > 0.0) {
        x.push_back(std::log(p.E0));
        y.push_back(std::log(p.leakage));
      }
    }
    double slope = std::nan(""), r2 = std::nan("");
    if (x.size() >= 2) {
      const double n = static_cast<double>(x.size());
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
      }
      double sxx = 0, sxy = 0, syy = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
      }
      slope = sxy / sxx;
      r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    }
    f << rels[j] << slope << r2 << static_cast<int>(x.size());
    f.end_row();
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, bool log) {
  if (text.empty()) throw Error(ErrorCode::InvalidValue, "empty grid");
  std::vector<std::string> parts;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorCode::InvalidValue, "grid must be lo:hi:n, got '" + text + "'");
    const double lo = to_number(parts[0]), hi = to_number(parts[1]);
    const double nd = to_number(parts[2]);
    const int n = static_cast<int>(nd);
    if (n < 1 || n != nd) throw Error(ErrorCode::InvalidValue, "grid size must be a positive integer");
    if (n == 1 && lo != hi) throw Error(ErrorCode::InvalidValue, "a one-point grid needs lo == hi");
    if (log && !(lo > 0.0 && hi > 0.0)) throw Error(ErrorCode::InvalidValue, "log grid needs positive bounds");
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      g.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo));
    }
    if (n > 1) g.back() = hi;
    return g;
  }
  std::vector<double> g;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) g.push_back(to_number(p));
  return g;
}

int run(const Options& opt, const Config& cfg) {
  Setup s;
  try {
    s = effective(opt, cfg);
    std::filesystem::create_directories(opt.out);
  } catch (const std::exception& e) {
    std::cerr << "qdot: " << e.what() << '\n';
    return ConfigError;
  }
  try {
    if (opt.command == "solve-one") solve_one(opt, cfg, s);
    else if (opt.command == "exciton") exciton(opt, cfg, s);
    else if (opt.command == "dynamics") dynamics(opt, cfg, s);
    else if (opt.command == "leakage-scan") leakage_scan_cmd(opt, cfg, s);
    else throw InputError("unknown command " + opt.command);
  } catch (const InputError& e) {
    std::cerr << "qdot: " << e.what() << '\n';
    return ConfigError;
  } catch (const Error& e) {
    std::cerr << "qdot: " << e.what() << '\n';
    // bad flag values surface as InvalidValue before any solver work
    return e.code() == ErrorCode::InvalidValue || e.code() == ErrorCode::GeometryInvalid ? ConfigError : SolverError;
  } catch (const std::exception& e) {
    std::cerr << "qdot: " << e.what() << '\n';
    return SolverError;
  }
  return Ok;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Exciton spectra, entanglement and driven dynamics of a spherical core/well/clad quantum dot"};
  Options opt;
  std::string out = ".";
  int periods = 0, states = 0, store_every = 0;
  app.add_option("--config", opt.config, "INI configuration file")->required();
  app.add_option("--out", out, "output directory");
  app.add_option("--ab-grid", opt.ab_grid, "a/b values: lo:hi:n, a comma list or one value");
  app.add_option("--E0", opt.E0, "field amplitudes in V/nm: comma list or lo:hi:n (log spaced)");
  app.add_option("--omega-rel", opt.omega_rel, "drive frequency over the resonance: value, list or lo:hi:n");
  auto* p_opt = app.add_option("--periods", periods, "leakage averaging window in drive periods");
  auto* s_opt = app.add_option("--states", states, "states reported, or bound excitons kept in dynamics");
  auto* e_opt = app.add_option("--store-every", store_every, "keep every n-th time step in trajectory.csv");
  app.add_flag("--no-selfpol", opt.no_selfpol, "drop the self-polarisation potential");
  app.add_flag("--no-polarization", opt.no_polarization, "set the barrier permittivity to the well value");
  app.add_flag("--compat-printed-eqs", opt.printed_eqs, "compatibility image-charge exponents (ImageForm::Printed)");
  for (const char* name : {"solve-one", "exciton", "dynamics", "leakage-scan"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ConfigError;
  }
  opt.command = app.get_subcommands().front()->get_name();
  opt.out = out;
  if (p_opt->count()) opt.periods = periods;
  if (s_opt->count()) opt.states = states;
  if (e_opt->count()) opt.store_every = store_every;
  Config cfg;
  try {
    cfg = load_config(opt.config);
  } catch (const std::exception& e) {
    std::cerr << "qdot: " << e.what() << '\n';
    return ConfigError;
  }
  return run(opt, cfg);
}

}  // namespace qdot::cli
