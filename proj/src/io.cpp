#include "pecd/io.hpp"
#include "pecd/error.hpp"
#include "pecd/units.hpp"
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pecd::io {

using nlohmann::json;
using cplx = std::complex<double>;

const char *const kVersion = "pecd 1.0.0";

UnitSystem parse_units(const std::string &s) {
  if (s == "au")
    return UnitSystem::au;
  if (s == "lab")
    return UnitSystem::lab;
  throw ConfigError("unknown unit system '" + s + "' (expected au or lab)");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_text(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw ConfigError("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw ConfigError("cannot write " + path);
  f << text;
}

namespace {

// --- schema helpers ---------------------------------------------------

json parse(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

const json &field(const json &j, const std::string &key, const std::string &path) {
  if (!j.is_object())
    throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(path + "/" + key, "missing");
  return *it;
}

double number(const json &j, const std::string &path) {
  if (!j.is_number())
    throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int integer(const json &j, const std::string &path) {
  if (!j.is_number_integer())
    throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

const json &array(const json &j, const std::string &path) {
  if (!j.is_array())
    throw SchemaError(path, "expected an array");
  return j;
}

cplx complex_value(const json &j, const std::string &path) {
  if (!j.is_array() || j.size() != 2)
    throw SchemaError(path, "expected [re, im]");
  return {number(j[0], path + "/0"), number(j[1], path + "/1")};
}

json complex_json(cplx v) { return json::array({v.real(), v.imag()}); }

model::Vec3c vec3(const json &j, const std::string &path) {
  array(j, path);
  if (j.size() != 3)
    throw SchemaError(path, "expected three spherical components (mu = -1, 0, +1)");
  model::Vec3c v{};
  for (std::size_t i = 0; i < 3; ++i)
    v[i] = complex_value(j[i], path + "/" + std::to_string(i));
  return v;
}

json vec3_json(const model::Vec3c &v) {
  json a = json::array();
  for (const auto &c : v)
    a.push_back(complex_json(c));
  return a;
}

std::string unit_tag(const json &root, const std::string &key, const std::string &dflt) {
  auto it = root.find("units");
  if (it == root.end())
    return dflt;
  if (!it->is_object())
    throw SchemaError("/units", "expected an object");
  auto u = it->find(key);
  if (u == it->end())
    return dflt;
  if (!u->is_string())
    throw SchemaError("/units/" + key, "expected a string");
  return u->get<std::string>();
}

void read_rows(const json &rows, const std::string &path, model::ChannelTable &t) {
  array(rows, path);
  if (rows.size() != t.energies())
    throw SchemaError(path, "expected " + std::to_string(t.energies()) + " energy rows, found " +
                                std::to_string(rows.size()));
  const int lmax = t.lmax();
  const std::size_t nch = static_cast<std::size_t>(model::channel_count(lmax)) * 3;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::string rp = path + "/" + std::to_string(k);
    const json &entries = array(field(rows[k], "entries", rp), rp + "/entries");
    std::vector<bool> seen(nch, false);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string ep = rp + "/entries/" + std::to_string(e);
      const int l = integer(field(entries[e], "l", ep), ep + "/l");
      const int m = integer(field(entries[e], "m", ep), ep + "/m");
      const int mu = integer(field(entries[e], "mu", ep), ep + "/mu");
      if (l < 0 || l > lmax)
        throw SchemaError(ep + "/l", "l outside 0..lmax");
      if (std::abs(m) > l)
        throw SchemaError(ep + "/m", "|m| > l");
      if (std::abs(mu) > 1)
        throw SchemaError(ep + "/mu", "mu outside -1..1");
      const std::size_t idx = static_cast<std::size_t>(model::channel(l, m)) * 3 + static_cast<std::size_t>(mu + 1);
      if (seen[idx])
        throw SchemaError(ep, "duplicate channel");
      seen[idx] = true;
      t.at(k, l, m, mu) = complex_value(field(entries[e], "value", ep), ep + "/value");
    }
    for (int l = 0; l <= lmax; ++l)
      for (int m = -l; m <= l; ++m)
        for (int mu = -1; mu <= 1; ++mu)
          if (!seen[static_cast<std::size_t>(model::channel(l, m)) * 3 + static_cast<std::size_t>(mu + 1)])
            throw SchemaError(rp + "/entries", "missing channel l=" + std::to_string(l) + " m=" +
                                                   std::to_string(m) + " mu=" + std::to_string(mu));
  }
}

json rows_json(const model::ChannelTable &t) {
  json rows = json::array();
  for (std::size_t k = 0; k < t.energies(); ++k) {
    json entries = json::array();
    for (int l = 0; l <= t.lmax(); ++l)
      for (int m = -l; m <= l; ++m)
        for (int mu = -1; mu <= 1; ++mu)
          entries.push_back({{"l", l}, {"m", m}, {"mu", mu}, {"value", complex_json(t.at(k, l, m, mu))}});
    rows.push_back({{"entries", entries}});
  }
  return rows;
}

double energy_scale(const std::string &tag, const std::string &path) {
  if (tag == "au")
    return 1.0;
  if (tag == "eV")
    return 1.0 / units::hartree_eV;
  throw SchemaError(path, "unknown energy unit '" + tag + "'");
}

} // namespace

// --- model --------------------------------------------------------------

model::MolecularModel model_from_json(const std::string &text) {
  const json root = parse(text);
  if (!root.is_object())
    throw SchemaError("", "expected an object");
  const double es = energy_scale(unit_tag(root, "energy", "au"), "/units/energy");
  model::MolecularModel m;
  m.homo_energy = es * number(field(root, "homo_energy", ""), "/homo_energy");
  m.lmax = integer(field(root, "lmax", ""), "/lmax");
  if (m.lmax < 0 || m.lmax > 12)
    throw SchemaError("/lmax", "lmax outside 0..12");
  const json &grid = array(field(root, "energy_grid", ""), "/energy_grid");
  for (std::size_t k = 0; k < grid.size(); ++k)
    m.energy_grid.push_back(es * number(grid[k], "/energy_grid/" + std::to_string(k)));
  m.ground_dipole = vec3(field(root, "ground_dipole", ""), "/ground_dipole");
  const json &bs = array(field(root, "bound_states", ""), "/bound_states");
  for (std::size_t r = 0; r < bs.size(); ++r) {
    const std::string p = "/bound_states/" + std::to_string(r);
    model::BoundState b;
    b.energy = es * number(field(bs[r], "energy", p), p + "/energy");
    b.dipole_from_homo = vec3(field(bs[r], "dipole_from_homo", p), p + "/dipole_from_homo");
    m.bound_states.push_back(b);
  }
  m.continuum_from_homo = model::ChannelTable(m.energy_grid.size(), m.lmax);
  read_rows(field(root, "continuum_from_homo", ""), "/continuum_from_homo", m.continuum_from_homo);
  const json &cb = array(field(root, "continuum_from_bound", ""), "/continuum_from_bound");
  if (cb.size() != bs.size())
    throw SchemaError("/continuum_from_bound", "expected one table per bound state");
  for (std::size_t r = 0; r < cb.size(); ++r) {
    model::ChannelTable t(m.energy_grid.size(), m.lmax);
    read_rows(cb[r], "/continuum_from_bound/" + std::to_string(r), t);
    m.continuum_from_bound.push_back(std::move(t));
  }
  m.validate();
  return m;
}

std::string model_to_json(const model::MolecularModel &m, UnitSystem u) {
  const double es = u == UnitSystem::lab ? units::hartree_eV : 1.0;
  json root;
  root["units"] = {{"energy", u == UnitSystem::lab ? "eV" : "au"}};
  root["homo_energy"] = es * m.homo_energy;
  root["lmax"] = m.lmax;
  json grid = json::array();
  for (double e : m.energy_grid)
    grid.push_back(es * e);
  root["energy_grid"] = grid;
  root["ground_dipole"] = vec3_json(m.ground_dipole);
  json bs = json::array();
  for (const auto &b : m.bound_states)
    bs.push_back({{"energy", es * b.energy}, {"dipole_from_homo", vec3_json(b.dipole_from_homo)}});
  root["bound_states"] = bs;
  root["continuum_from_homo"] = rows_json(m.continuum_from_homo);
  json cb = json::array();
  for (const auto &t : m.continuum_from_bound)
    cb.push_back(rows_json(t));
  root["continuum_from_bound"] = cb;
  return root.dump(1) + "\n";
}

model::MolecularModel load_model(const std::string &path) { return model_from_json(read_text(path)); }

void save_model(const model::MolecularModel &m, const std::string &path, UnitSystem u) {
  write_text(path, model_to_json(m, u));
}

// --- pulses -------------------------------------------------------------

field::PulseTrain pulses_from_json(const std::string &text) {
  const json root = parse(text);
  if (!root.is_object())
    throw SchemaError("", "expected an object");
  const std::string ua = unit_tag(root, "amplitude", "au");
  const std::string ue = unit_tag(root, "energy", "au");
  const std::string ut = unit_tag(root, "time", "au");
  const std::string up = unit_tag(root, "phase", "rad");
  if (ua != "au" && ua != "W/cm2")
    throw SchemaError("/units/amplitude", "expected au or W/cm2");
  const double es = energy_scale(ue, "/units/energy");
  double ts = 1.0;
  if (ut == "fs")
    ts = 1.0 / units::au_time_fs;
  else if (ut != "au")
    throw SchemaError("/units/time", "expected au or fs");
  double ps = 1.0;
  if (up == "deg")
    ps = units::pi / 180.0;
  else if (up != "rad")
    throw SchemaError("/units/phase", "expected rad or deg");

  field::PulseTrain t;
  if (root.contains("mu0"))
    t.mu0 = integer(root["mu0"], "/mu0");
  if (std::abs(t.mu0) > 1)
    throw SchemaError("/mu0", "expected -1, 0 or +1");
  const json &ps_ = array(field(root, "pulses", ""), "/pulses");
  for (std::size_t j = 0; j < ps_.size(); ++j) {
    const std::string p = "/pulses/" + std::to_string(j);
    field::PulseParams q;
    const double a = number(field(ps_[j], "amplitude", p), p + "/amplitude");
    if (a < 0)
      throw SchemaError(p + "/amplitude", "must be >= 0");
    q.amplitude = ua == "W/cm2" ? units::field_from_intensity(a) : a;
    q.carrier = es * number(field(ps_[j], "carrier", p), p + "/carrier");
    q.cep = ps * number(field(ps_[j], "cep", p), p + "/cep");
    q.fwhm = ts * number(field(ps_[j], "fwhm", p), p + "/fwhm");
    if (!(q.fwhm > 0))
      throw SchemaError(p + "/fwhm", "must be > 0");
    q.delay = ps_[j].contains("delay") ? ts * number(ps_[j]["delay"], p + "/delay") : 0.0;
    t.pulses.push_back(q);
  }
  return t;
}

std::string pulses_to_json(const field::PulseTrain &t, UnitSystem u) {
  const bool lab = u == UnitSystem::lab;
  json root;
  root["units"] = lab ? json{{"amplitude", "W/cm2"}, {"energy", "eV"}, {"time", "fs"}, {"phase", "rad"}}
                      : json{{"amplitude", "au"}, {"energy", "au"}, {"time", "au"}, {"phase", "rad"}};
  root["mu0"] = t.mu0;
  json ps = json::array();
  for (const auto &p : t.pulses)
    ps.push_back({{"amplitude", lab ? units::intensity_from_field(p.amplitude) : p.amplitude},
                  {"carrier", lab ? units::au_to_eV(p.carrier) : p.carrier},
                  {"cep", p.cep},
                  {"fwhm", lab ? units::au_to_fs(p.fwhm) : p.fwhm},
                  {"delay", lab ? units::au_to_fs(p.delay) : p.delay}});
  root["pulses"] = ps;
  return root.dump(1) + "\n";
}

field::PulseTrain load_pulses(const std::string &path) { return pulses_from_json(read_text(path)); }

// --- emitters -----------------------------------------------------------

namespace {

double E(double e, UnitSystem u) { return u == UnitSystem::lab ? units::au_to_eV(e) : e; }
double T(double t, UnitSystem u) { return u == UnitSystem::lab ? units::au_to_fs(t) : t; }
double A(double a, UnitSystem u) { return u == UnitSystem::lab ? a * 180.0 / units::pi : a; }
const char *eunit(UnitSystem u) { return u == UnitSystem::lab ? "eV" : "au"; }
const char *tunit(UnitSystem u) { return u == UnitSystem::lab ? "fs" : "au"; }
const char *aunit(UnitSystem u) { return u == UnitSystem::lab ? "deg" : "rad"; }

// JSON numbers rounded to the CSV precision, so both artifacts agree
double r12(double v) { return std::stod(fmt(v)); }

} // namespace

std::string betas_csv(const anisotropy::BetaSet &b, UnitSystem u) {
  std::string s = std::string("pathway,L,M,energy_") + eunit(u) + ",re,im\n";
  for (const auto *t : {&b.one, &b.two, &b.inter})
    for (int L = t->Lmin; L <= t->Lmax; ++L)
      for (std::size_t k = 0; k < t->energies.size(); ++k) {
        const auto v = t->at(L, k);
        s += std::string(anisotropy::pathway_name(t->pathway)) + "," + std::to_string(L) + "," +
             std::to_string(t->M) + "," + fmt(E(t->energies[k], u)) + "," + fmt(v.real()) + "," +
             fmt(v.imag()) + "\n";
      }
  return s;
}

std::string betas_json(const anisotropy::BetaSet &b, UnitSystem u) {
  json root;
  root["mu0"] = b.mu0;
  root["energy_unit"] = eunit(u);
  json e = json::array();
  for (double x : b.energies())
    e.push_back(r12(E(x, u)));
  root["energies"] = e;
  json tabs = json::array();
  for (const auto *t : {&b.one, &b.two, &b.inter}) {
    json tj;
    tj["pathway"] = anisotropy::pathway_name(t->pathway);
    tj["M"] = t->M;
    tj["Lmin"] = t->Lmin;
    tj["Lmax"] = t->Lmax;
    tj["nonstandard"] = t->nonstandard;
    json vals = json::array();
    for (int L = t->Lmin; L <= t->Lmax; ++L) {
      json row = json::array();
      for (std::size_t k = 0; k < t->energies.size(); ++k)
        row.push_back(json::array({r12(t->at(L, k).real()), r12(t->at(L, k).imag())}));
      vals.push_back(row);
    }
    tj["values"] = vals;
    tabs.push_back(tj);
  }
  root["tables"] = tabs;
  return root.dump(1) + "\n";
}

std::string pecd_csv(const observables::PECDMap &m, UnitSystem u) {
  std::string s = std::string("energy_") + eunit(u) + ",theta_" + aunit(u) + ",pecd_percent\n";
  for (std::size_t k = 0; k < m.energies.size(); ++k)
    for (std::size_t it = 0; it < m.theta.size(); ++it)
      s += fmt(E(m.energies[k], u)) + "," + fmt(A(m.theta[it], u)) + "," + fmt(m.at(k, it)) + "\n";
  return s;
}

std::string pecd_json(const observables::PECDMap &m, UnitSystem u) {
  json root;
  root["energy_unit"] = eunit(u);
  root["theta_unit"] = aunit(u);
  root["normalization"] = r12(m.norm);
  json e = json::array(), t = json::array(), v = json::array();
  for (double x : m.energies)
    e.push_back(r12(E(x, u)));
  for (double x : m.theta)
    t.push_back(r12(A(x, u)));
  for (std::size_t k = 0; k < m.energies.size(); ++k) {
    json row = json::array();
    for (std::size_t it = 0; it < m.theta.size(); ++it)
      row.push_back(r12(m.at(k, it)));
    v.push_back(row);
  }
  root["energies"] = e;
  root["theta"] = t;
  root["pecd_percent"] = v;
  return root.dump(1) + "\n";
}

std::string pecd_gnuplot(const observables::PECDMap &m, UnitSystem u) {
  std::string s = std::to_string(m.theta.size());
  for (double t : m.theta)
    s += " " + fmt(A(t, u));
  s += "\n";
  for (std::size_t k = 0; k < m.energies.size(); ++k) {
    s += fmt(E(m.energies[k], u));
    for (std::size_t it = 0; it < m.theta.size(); ++it)
      s += " " + fmt(m.at(k, it));
    s += "\n";
  }
  return s;
}

std::string scan_csv(const std::vector<control::ScanPoint> &sc, UnitSystem u) {
  std::string s = std::string("tau_") + tunit(u) + ",max_abs_pecd_percent\n";
  for (const auto &p : sc)
    s += fmt(T(p.tau, u)) + "," + fmt(p.value) + "\n";
  return s;
}

std::string bichromatic_csv(const control::BichromaticMap &b, const std::vector<double> &panel,
                            UnitSystem u) {
  std::string s = std::string("omega_") + eunit(u) + "\\dphi_rad";
  for (double p : b.dphi)
    s += "," + fmt(p);
  s += "\n";
  for (std::size_t iw = 0; iw < b.omega.size(); ++iw) {
    s += fmt(E(b.omega[iw], u));
    for (std::size_t ip = 0; ip < b.dphi.size(); ++ip)
      s += "," + fmt(panel[b.index(iw, ip)]);
    s += "\n";
  }
  return s;
}

std::string history_json(const control::PulseOptimization &r, UnitSystem u) {
  json root;
  root["best_objective"] = r.state.best;
  root["evaluations"] = r.state.evaluations;
  root["cycles"] = r.state.cycles;
  root["best_train"] = json::parse(pulses_to_json(r.best, u));
  json h = json::array();
  for (std::size_t i = 0; i < r.state.history.size(); ++i) {
    const auto &e = r.state.history[i];
    json row = {{"evaluation", e.evaluation}, {"value", e.value}, {"best", e.best}, {"rejected", e.rejected}};
    if (i < r.audit.size()) {
      row["peak_intensity_Wcm2"] = r.audit[i].intensity;
      row["yield"] = r.audit[i].yield;
    }
    h.push_back(row);
  }
  root["history"] = h;
  return root.dump(1) + "\n";
}

std::string wigner_csv(const field::WignerMap &w, UnitSystem u) {
  std::string s = std::string("t_") + tunit(u) + ",omega_" + eunit(u) + ",W\n";
  for (std::size_t it = 0; it < w.t.size(); ++it)
    for (std::size_t iw = 0; iw < w.w.size(); ++iw)
      s += fmt(T(w.t[it], u)) + "," + fmt(E(w.w[iw], u)) + "," + fmt(w.at(it, iw)) + "\n";
  return s;
}

// --- manifest -----------------------------------------------------------

std::uint64_t fnv1a(const std::string &bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string manifest_json(const Manifest &m) {
  json root;
  root["experiment"] = m.experiment;
  root["config_hash"] = m.config_hash;
  root["seed"] = m.seed;
  root["threads"] = m.threads;
  root["units"] = m.units;
  root["version"] = kVersion;
  root["outputs"] = m.outputs;
  json t = json::object();
  for (const auto &[k, v] : m.timings)
    t[k] = v;
  root["timings_s"] = t;
  return root.dump(1) + "\n";
}

} // namespace pecd::io
