#include "qdot/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "qdot/error.hpp"

namespace qdot {
namespace {

namespace pt = boost::property_tree;

// Section names contain dots, so paths use '/' as separator.
pt::ptree::path_type key(const std::string& section, const std::string& field) {
  return pt::ptree::path_type(section + "/" + field, '/');
}

std::optional<std::string> get_text(const pt::ptree& doc, const std::string& section, const std::string& field) {
  if (auto v = doc.get_optional<std::string>(key(section, field))) return *v;
  return std::nullopt;
}

double to_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(ErrorCode::InvalidValue, where + " = '" + text + "'");
  return v;
}

std::optional<double> get_double(const pt::ptree& doc, const std::string& section, const std::string& field) {
  if (auto t = get_text(doc, section, field)) return to_double(*t, section + "." + field);
  return std::nullopt;
}

double require_double(const pt::ptree& doc, const std::string& section, const std::string& field) {
  if (auto v = get_double(doc, section, field)) return *v;
  throw Error(ErrorCode::MissingField, "[" + section + "] " + field);
}

template <class T>
void read_into(const pt::ptree& doc, const std::string& section, const std::string& field, T& out) {
  auto t = get_text(doc, section, field);
  if (!t) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (*t == "true" || *t == "1") out = true;
    else if (*t == "false" || *t == "0") out = false;
    else throw Error(ErrorCode::InvalidValue, section + "." + field + " = '" + *t + "'");
  } else if constexpr (std::is_integral_v<T>) {
    T v{};
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc() || ptr != t->data() + t->size()) {
      throw Error(ErrorCode::InvalidValue, section + "." + field + " = '" + *t + "'");
    }
    out = v;
  } else {
    out = to_double(*t, section + "." + field);
  }
}

Material read_material(const pt::ptree& doc, const std::string& section) {
  if (!doc.get_child_optional(pt::ptree::path_type(section, '/'))) {
    throw Error(ErrorCode::MissingField, "[" + section + "]");
  }
  Material m;
  auto name = get_text(doc, section, "name");
  std::optional<Material> base;
  if (name) {
    m.name = *name;
    if (*name == "CdS" || *name == "HgS") base = builtin_material(*name);
  }
  auto field = [&](const char* f, double Material::*member) {
    if (auto v = get_double(doc, section, f)) {
      m.*member = *v;
    } else if (base) {
      m.*member = (*base).*member;
    } else {
      throw Error(ErrorCode::MissingField, "[" + section + "] " + f);
    }
  };
  field("m_e", &Material::m_e);
  field("m_h", &Material::m_h);
  field("eps", &Material::eps);
  m.e_gap = get_double(doc, section, "E_gap");
  if (m.name.empty()) m.name = section;
  return m;
}

Device read_device(const pt::ptree& doc) {
  Device d;
  d.well = read_material(doc, "material.well");
  d.barrier = read_material(doc, "material.barrier");
  if (!d.well.e_gap) throw Error(ErrorCode::MissingField, "[material.well] E_gap");
  d.a = require_double(doc, "device", "a");
  d.b = require_double(doc, "device", "b");
  d.R = require_double(doc, "device", "R");

  auto v0e = get_double(doc, "device", "V0_e");
  auto v0h = get_double(doc, "device", "V0_h");
  if (!v0e) {
    v0e = require_double(doc, "device", "Ec_barrier") - require_double(doc, "device", "Ec_well");
  }
  if (!v0h) {
    v0h = require_double(doc, "device", "Ev_well") - require_double(doc, "device", "Ev_barrier");
  }
  d.v0_e = *v0e;
  d.v0_h = *v0h;
  validate(d);
  return d;
}

pt::ptree read_tree(std::istream& in) {
  pt::ptree doc;
  try {
    pt::read_ini(in, doc);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidValue, e.what());
  }
  return doc;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Device load_device(std::istream& in) { return read_device(read_tree(in)); }

Config parse_config(std::istream& in) {
  const pt::ptree doc = read_tree(in);
  Config cfg;
  cfg.device = read_device(doc);

  Numerics& n = cfg.numerics;
  read_into(doc, "numerics", "order", n.order);
  read_into(doc, "numerics", "intervals", n.intervals);
  read_into(doc, "numerics", "interface_multiplicity", n.interface_multiplicity);
  read_into(doc, "numerics", "quad_points", n.quad_points);
  read_into(doc, "numerics", "n_max", n.n_max);
  read_into(doc, "numerics", "l_max", n.l_max);
  read_into(doc, "numerics", "selfpol_lmax", n.selfpol_lmax);
  read_into(doc, "numerics", "include_selfpol", n.include_selfpol);
  read_into(doc, "numerics", "printed_exponents", n.printed_exponents);
  if (n.n_max < 1 || n.l_max < 0 || n.selfpol_lmax < 0) {
    throw Error(ErrorCode::InvalidValue, "numerics: n_max >= 1, l_max >= 0, selfpol_lmax >= 0 required");
  }

  DriveConfig& dr = cfg.drive;
  read_into(doc, "drive", "E0", dr.E0);
  read_into(doc, "drive", "omega_rel", dr.omega_rel);
  read_into(doc, "drive", "periods", dr.periods);
  read_into(doc, "drive", "steps_per_period", dr.steps_per_period);
  read_into(doc, "drive", "n_states", dr.n_states);
  read_into(doc, "drive", "mu_bulk", dr.mu_bulk);
  read_into(doc, "drive", "transient", dr.transient);
  if (dr.E0 < 0.0 || !(dr.omega_rel > 0.0) || dr.periods < 1 || dr.steps_per_period < 200 || dr.n_states < 1) {
    throw Error(ErrorCode::InvalidValue, "drive: E0 >= 0, omega_rel > 0, periods >= 1, steps_per_period >= 200");
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingField, "cannot open config " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const Config& cfg) {
  auto material = [&](const char* section, const Material& m) {
    out << "[" << section << "]\n";
    out << "name = " << m.name << "\n";
    out << "m_e = " << fmt_double(m.m_e) << "\n";
    out << "m_h = " << fmt_double(m.m_h) << "\n";
    out << "eps = " << fmt_double(m.eps) << "\n";
    if (m.e_gap) out << "E_gap = " << fmt_double(*m.e_gap) << "\n";
    out << "\n";
  };
  const Device& d = cfg.device;
  out << "[device]\n";
  out << "a = " << fmt_double(d.a) << "\n";
  out << "b = " << fmt_double(d.b) << "\n";
  out << "R = " << fmt_double(d.R) << "\n";
  out << "V0_e = " << fmt_double(d.v0_e) << "\n";
  out << "V0_h = " << fmt_double(d.v0_h) << "\n\n";
  material("material.well", d.well);
  material("material.barrier", d.barrier);

  const Numerics& n = cfg.numerics;
  out << "[numerics]\n";
  out << "order = " << n.order << "\n";
  out << "intervals = " << n.intervals << "\n";
  out << "interface_multiplicity = " << n.interface_multiplicity << "\n";
  out << "quad_points = " << n.quad_points << "\n";
  out << "n_max = " << n.n_max << "\n";
  out << "l_max = " << n.l_max << "\n";
  out << "selfpol_lmax = " << n.selfpol_lmax << "\n";
  out << "include_selfpol = " << (n.include_selfpol ? "true" : "false") << "\n";
  out << "printed_exponents = " << (n.printed_exponents ? "true" : "false") << "\n\n";

  const DriveConfig& dr = cfg.drive;
  out << "[drive]\n";
  out << "E0 = " << fmt_double(dr.E0) << "\n";
  out << "omega_rel = " << fmt_double(dr.omega_rel) << "\n";
  out << "periods = " << dr.periods << "\n";
  out << "steps_per_period = " << dr.steps_per_period << "\n";
  out << "n_states = " << dr.n_states << "\n";
  out << "mu_bulk = " << fmt_double(dr.mu_bulk) << "\n";
  out << "transient = " << fmt_double(dr.transient) << "\n";
}

}  // namespace qdot
