// pecd_cli: experiment runner. One subcommand per experiment; every
// numeric parameter also accepted from a JSON config (--config).
#include "CLI11.hpp"
#include "json.hpp"
#include "pecd/control.hpp"
#include "pecd/error.hpp"
#include "pecd/io.hpp"
#include "pecd/units.hpp"
#include "pecd/verify.hpp"
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#ifdef _OPENMP
#include <omp.h>
#endif

using namespace pecd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Kind { text, integer, real };

struct Param {
  const char *key;
  Kind kind;
  json fallback;
  const char *help;
};

// clang-format off
const std::vector<Param> &params() {
  static const std::vector<Param> p = {
      {"experiment", Kind::text, nullptr, "betas|pecd|delay-scan|bichromatic-map|optimize|verify|wigner-map|gen-model"},
      {"model", Kind::text, nullptr, "model JSON"},
      {"pulses", Kind::text, nullptr, "pulse-train JSON"},
      {"out", Kind::text, "out", "output directory"},
      {"seed", Kind::integer, 1, "seed (optimizer, gen-model)"},
      {"threads", Kind::integer, 0, "OpenMP threads, 0 = all"},
      {"units", Kind::text, "lab", "au | lab (eV, fs, deg)"},
      {"suite", Kind::text, "all", "verify suite"},
      {"mu0", Kind::integer, nullptr, "helicity override"},
      {"theta_points", Kind::integer, 181, "polar-angle nodes on [0, pi]"},
      {"objective", Kind::text, "gamma_prime", "gamma (fixed energy) | gamma_prime"},
      {"target_energy", Kind::real, nullptr, "photoelectron energy for gamma; default grid midpoint"},
      {"cutoff", Kind::real, nullptr, "spectral split for delay-scan; default mean carrier"},
      {"tau_min", Kind::real, 0.0, "first delay"},
      {"tau_max", Kind::real, nullptr, "last delay; default 4 x longest fwhm"},
      {"tau_points", Kind::integer, 101, "delay nodes"},
      {"omega_min", Kind::real, nullptr, "fundamental frequency range; default 0.8 x template"},
      {"omega_max", Kind::real, nullptr, "default 1.2 x template"},
      {"omega_points", Kind::integer, 41, "frequency nodes"},
      {"dphi_points", Kind::integer, 37, "relative-phase nodes over [0, 2 pi]"},
      {"budget", Kind::integer, 400, "optimizer evaluations"},
      {"rempi", Kind::integer, 0, "start from an n-pathway REMPI setup"},
      {"rempi_amplitude", Kind::real, 3e-4, "REMPI sub-pulse amplitude (au)"},
      {"rempi_fwhm", Kind::real, nullptr, "REMPI sub-pulse fwhm; default 6 fs"},
      {"intensity_cap", Kind::real, 1e11, "W/cm2, <= 0 disables"},
      {"yield_cap", Kind::real, 0.06, "<= 0 disables"},
      {"min_delay_gap", Kind::real, 0.0, "minimum sub-pulse separation"},
      {"t_min", Kind::real, nullptr, "Wigner time range; default pulse support"},
      {"t_max", Kind::real, nullptr, ""},
      {"t_points", Kind::integer, 201, ""},
      {"w_min", Kind::real, nullptr, "Wigner frequency range; default carriers +- 4 bandwidths"},
      {"w_max", Kind::real, nullptr, ""},
      {"w_points", Kind::integer, 201, ""},
      {"bound", Kind::integer, 2, "gen-model bound states"},
      {"lmax", Kind::integer, 2, "gen-model partial waves"},
      {"energies", Kind::integer, 16, "gen-model grid nodes"},
      {"e_min", Kind::real, 1.0, "gen-model grid start (eV)"},
      {"e_max", Kind::real, 4.0, "gen-model grid end (eV)"},
  };
  return p;
}
// clang-format on

const std::vector<std::string> kExperiments = {"betas",    "pecd",       "delay-scan", "bichromatic-map",
                                               "optimize", "verify",     "wigner-map", "gen-model"};

std::string flag(const char *key) {
  std::string f = std::string("--") + key;
  for (auto &c : f)
    if (c == '_')
      c = '-';
  return f;
}

json convert(const Param &p, const std::string &raw) {
  try {
    switch (p.kind) {
    case Kind::text:
      return raw;
    case Kind::integer: {
      std::size_t used = 0;
      const long long v = std::stoll(raw, &used);
      if (used != raw.size())
        break;
      return v;
    }
    case Kind::real: {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size())
        break;
      return v;
    }
    }
  } catch (const std::exception &) {
  }
  throw ConfigError(flag(p.key) + ": cannot parse '" + raw + "'");
}

//! Typed access to the merged configuration.
class Config {
public:
  explicit Config(json j) : j_(std::move(j)) {}
  bool has(const std::string &k) const { return j_.contains(k) && !j_[k].is_null(); }
  std::string text(const std::string &k) const { return get<std::string>(k); }
  long long integer(const std::string &k) const { return get<long long>(k); }
  double real(const std::string &k) const {
    if (has(k) && j_[k].is_number())
      return j_[k].get<double>();
    return get<double>(k);
  }
  int positive(const std::string &k, int lo = 1) const {
    const long long v = integer(k);
    if (v < lo || v > 1000000)
      throw ConfigError(flag(k.c_str()) + " out of range");
    return static_cast<int>(v);
  }
  const json &raw() const { return j_; }

private:
  template <class T> T get(const std::string &k) const {
    if (!has(k))
      throw ConfigError(flag(k.c_str()) + " is required");
    try {
      return j_[k].get<T>();
    } catch (const json::exception &) {
      throw ConfigError(flag(k.c_str()) + " has the wrong type");
    }
  }
  json j_;
};

struct Units {
  io::UnitSystem sys;
  bool lab() const { return sys == io::UnitSystem::lab; }
  double energy_in(double v) const { return lab() ? units::eV_to_au(v) : v; }
  double energy_out(double v) const { return lab() ? units::au_to_eV(v) : v; }
  double time_in(double v) const { return lab() ? units::fs_to_au(v) : v; }
  double time_out(double v) const { return lab() ? units::au_to_fs(v) : v; }
};

double r12(double v) { return std::stod(io::fmt(v)); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

class Run {
public:
  Run(Config c, std::string input_bytes)
      : c_(std::move(c)), u_{io::parse_units(c_.text("units"))}, out_(c_.text("out")),
        inputs_(std::move(input_bytes)) {}

  int execute();

private:
  using clock = std::chrono::steady_clock;

  const model::MolecularModel &model() {
    if (!model_)
      model_ = io::load_model(c_.text("model"));
    return *model_;
  }
  const field::PulseTrain &train() {
    if (!train_) {
      train_ = io::load_pulses(c_.text("pulses"));
      if (c_.has("mu0"))
        train_->mu0 = static_cast<int>(c_.integer("mu0"));
      train_->validate();
    }
    return *train_;
  }
  void emit(const std::string &name, const std::string &text) {
    io::write_text((out_ / name).string(), text);
    outputs_.push_back(name);
  }
  void lap(const std::string &what) {
    const auto now = clock::now();
    timings_.emplace_back(what, std::chrono::duration<double>(now - t_).count());
    t_ = now;
  }
  double target_energy() {
    if (c_.has("target_energy"))
      return u_.energy_in(c_.real("target_energy"));
    const auto &g = model().energy_grid;
    return 0.5 * (g.front() + g.back());
  }
  control::ObjectiveSpec objective_spec() {
    control::ObjectiveSpec s;
    const auto o = c_.text("objective");
    if (o == "gamma") {
      s.mode = control::Mode::fixed_energy;
      s.target_energy = target_energy();
    } else if (o != "gamma_prime") {
      throw ConfigError("--objective must be gamma or gamma_prime");
    }
    s.intensity_cap = c_.real("intensity_cap");
    s.yield_cap = c_.real("yield_cap");
    s.min_delay_gap = u_.time_in(c_.real("min_delay_gap"));
    s.eval.theta = observables::theta_grid(c_.positive("theta_points", 3));
    return s;
  }

  int betas();
  int pecd();
  int delay_scan();
  int bichromatic();
  int optimize();
  int verify();
  int wigner();
  int gen_model();

  Config c_;
  Units u_;
  fs::path out_;
  std::string inputs_;
  std::optional<model::MolecularModel> model_;
  std::optional<field::PulseTrain> train_;
  std::vector<std::string> outputs_;
  std::vector<std::pair<std::string, double>> timings_;
  clock::time_point t_ = clock::now();
};

int Run::betas() {
  const auto b = anisotropy::compute_betas(model(), train(), train().mu0);
  lap("betas");
  emit("betas.csv", io::betas_csv(b, u_.sys));
  emit("betas.json", io::betas_json(b, u_.sys));
  return 0;
}

int Run::pecd() {
  if (train().mu0 == 0)
    throw ConfigError("PECD needs a circular pulse (mu0 = +1 or -1)");
  const auto b = anisotropy::compute_betas(model(), train(), 1);
  observables::MapOptions mo;
  mo.theta = observables::theta_grid(c_.positive("theta_points", 3));
  const auto map = observables::pecd_map(b, mo);
  const auto rf = observables::hemisphere_average(map, true);
  const auto rb = observables::hemisphere_average(map, false);
  lap("pecd");
  emit("pecd.csv", io::pecd_csv(map, u_.sys));
  emit("pecd.json", io::pecd_json(map, u_.sys));
  emit("pecd.dat", io::pecd_gnuplot(map, u_.sys));
  std::string h = std::string("energy_") + (u_.lab() ? "eV" : "au") + ",rho_f,rho_b\n";
  for (std::size_t k = 0; k < rf.size(); ++k)
    h += io::fmt(u_.energy_out(map.energies[k])) + "," + io::fmt(rf[k]) + "," + io::fmt(rb[k]) + "\n";
  emit("hemisphere.csv", h);
  const auto x = observables::argmax_pecd(map);
  //! signed PECD at the point of largest magnitude
  json s = {{"extremal_pecd_percent", r12(x.value)},
            {"energy", r12(u_.energy_out(x.energy))},
            {"energy_unit", u_.lab() ? "eV" : "au"},
            {"theta", r12(u_.lab() ? x.theta * 180.0 / units::pi : x.theta)},
            {"theta_unit", u_.lab() ? "deg" : "rad"},
            {"normalization", r12(map.norm)},
            {"yield", r12(observables::yield(b))}};
  emit("pecd_summary.json", s.dump(1) + "\n");
  return 0;
}

int Run::delay_scan() {
  const auto &t = train();
  if (t.pulses.size() < 2)
    throw ConfigError("delay-scan needs at least two sub-pulses");
  double cutoff = 0.0;
  if (c_.has("cutoff")) {
    cutoff = u_.energy_in(c_.real("cutoff"));
  } else {
    for (const auto &p : t.pulses)
      cutoff += p.carrier / static_cast<double>(t.pulses.size());
  }
  double fw = 0.0;
  for (const auto &p : t.pulses)
    fw = std::max(fw, p.fwhm);
  const double t0 = u_.time_in(c_.real("tau_min"));
  const double t1 = c_.has("tau_max") ? u_.time_in(c_.real("tau_max")) : t0 + 4.0 * fw;
  const auto taus = linspace(t0, t1, c_.positive("tau_points", 2));
  auto spec = objective_spec();
  spec.intensity_cap = 0.0;
  spec.yield_cap = 0.0;
  const auto scan = control::delay_scan(model(), t, cutoff, taus, spec);
  lap("scan");
  emit("delay_scan.csv", io::scan_csv(scan, u_.sys));
  double lo = scan.front().value, hi = lo;
  for (const auto &p : scan)
    lo = std::min(lo, p.value), hi = std::max(hi, p.value);
  json s = {{"dominant_angular_frequency", r12(u_.energy_out(control::dominant_frequency(scan)))},
            {"frequency_unit", u_.lab() ? "eV" : "au"},
            {"min", r12(lo)},
            {"max", r12(hi)},
            {"relative_variation", r12(hi > 0 ? (hi - lo) / hi : 0.0)}};
  emit("delay_scan_summary.json", s.dump(1) + "\n");
  return 0;
}

int Run::bichromatic() {
  const auto &t = train();
  if (t.pulses.size() != 2)
    throw ConfigError("bichromatic-map needs a two-pulse template (fundamental, harmonic)");
  const double w0 = t.pulses[0].carrier;
  const double a = c_.has("omega_min") ? u_.energy_in(c_.real("omega_min")) : 0.8 * w0;
  const double b = c_.has("omega_max") ? u_.energy_in(c_.real("omega_max")) : 1.2 * w0;
  const int np = c_.positive("dphi_points", 2);
  std::vector<double> dphi(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i)
    dphi[static_cast<std::size_t>(i)] = 2.0 * units::pi * i / (np - 1);
  auto spec = objective_spec();
  spec.intensity_cap = 0.0;
  spec.yield_cap = 0.0;
  const auto map = control::bichromatic_map(model(), linspace(a, b, c_.positive("omega_points")), dphi, t, spec);
  lap("map");
  emit("bichromatic_pecd.csv", io::bichromatic_csv(map, map.pecd, u_.sys));
  emit("bichromatic_1ph.csv", io::bichromatic_csv(map, map.one, u_.sys));
  emit("bichromatic_2ph.csv", io::bichromatic_csv(map, map.two, u_.sys));
  emit("bichromatic_int.csv", io::bichromatic_csv(map, map.inter, u_.sys));
  return 0;
}

int Run::optimize() {
  control::ObjectiveSpec spec = objective_spec();
  field::PulseTrain start;
  if (const int n = static_cast<int>(c_.integer("rempi")); n > 0) {
    const double fw = c_.has("rempi_fwhm") ? u_.time_in(c_.real("rempi_fwhm")) : units::fs_to_au(6.0);
    auto setup = control::multi_rempi_setup(model(), target_energy(), n, c_.real("rempi_amplitude"), fw);
    setup.spec.intensity_cap = spec.intensity_cap;
    setup.spec.yield_cap = spec.yield_cap;
    setup.spec.min_delay_gap = spec.min_delay_gap;
    setup.spec.eval.theta = spec.eval.theta;
    spec = setup.spec;
    start = setup.train;
  } else {
    start = train();
  }
  control::OptimizerOptions opt;
  opt.budget = c_.positive("budget");
  opt.seed = static_cast<std::uint64_t>(c_.integer("seed"));
  const auto r = control::principal_axis_optimize(model(), spec, start, opt);
  lap("optimize");
  emit("history.json", io::history_json(r, u_.sys));
  emit("best_pulses.json", io::pulses_to_json(r.best, u_.sys));
  emit("best_betas.csv", io::betas_csv(r.evaluation.betas, u_.sys));
  emit("best_pecd.csv", io::pecd_csv(r.evaluation.map, u_.sys));
  return 0;
}

int Run::verify() {
  const auto reports = verify::run(c_.text("suite"), model(), train());
  lap("verify");
  emit("verify.json", verify::report_json(reports));
  std::cout << verify::report_text(reports);
  bool ok = true;
  for (const auto &r : reports)
    ok = ok && r.pass();
  std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  return ok ? 0 : 1;
}

int Run::wigner() {
  const auto &t = train();
  if (t.pulses.empty())
    throw ConfigError("wigner-map needs at least one sub-pulse");
  double tlo = std::numeric_limits<double>::infinity(), thi = -tlo, wlo = tlo, whi = -tlo;
  for (const auto &p : t.pulses) {
    tlo = std::min(tlo, p.delay - 4.0 * p.sigma());
    thi = std::max(thi, p.delay + 4.0 * p.sigma());
    wlo = std::min(wlo, p.carrier - 4.0 / p.sigma());
    whi = std::max(whi, p.carrier + 4.0 / p.sigma());
  }
  const double t0 = c_.has("t_min") ? u_.time_in(c_.real("t_min")) : tlo;
  const double t1 = c_.has("t_max") ? u_.time_in(c_.real("t_max")) : thi;
  const double w0 = c_.has("w_min") ? u_.energy_in(c_.real("w_min")) : std::max(0.0, wlo);
  const double w1 = c_.has("w_max") ? u_.energy_in(c_.real("w_max")) : whi;
  const auto w = field::wigner_time_frequency(t, linspace(t0, t1, c_.positive("t_points", 2)),
                                              linspace(w0, w1, c_.positive("w_points", 2)));
  lap("wigner");
  emit("wigner.csv", io::wigner_csv(w, u_.sys));
  return 0;
}

int Run::gen_model() {
  const auto grid = model::energy_grid_eV(c_.real("e_min"), c_.real("e_max"), c_.positive("energies", 2));
  const auto m = model::generate_toy_chiral(static_cast<std::uint64_t>(c_.integer("seed")),
                                            c_.positive("bound", 0), c_.positive("lmax", 0), grid);
  lap("generate");
  emit("model.json", io::model_to_json(m));
  return 0;
}

int Run::execute() {
  const std::string e = c_.text("experiment");
  fs::create_directories(out_);
  const int threads = static_cast<int>(c_.integer("threads"));
  if (threads < 0)
    throw ConfigError("--threads must be >= 0");
#ifdef _OPENMP
  if (threads > 0)
    omp_set_num_threads(threads);
  const int used = omp_get_max_threads();
#else
  const int used = 1;
#endif
  const std::map<std::string, int (Run::*)()> table = {
      {"betas", &Run::betas},           {"pecd", &Run::pecd},         {"delay-scan", &Run::delay_scan},
      {"bichromatic-map", &Run::bichromatic}, {"optimize", &Run::optimize}, {"verify", &Run::verify},
      {"wigner-map", &Run::wigner},     {"gen-model", &Run::gen_model}};
  const auto it = table.find(e);
  if (it == table.end())
    throw ConfigError("unknown experiment '" + e + "'");
  const auto start = clock::now();
  const int status = (this->*(it->second))();
  timings_.emplace_back("total", std::chrono::duration<double>(clock::now() - start).count());

  // hash covers the experiment-defining settings and every input byte
  json key = c_.raw();
  key.erase("out");
  key.erase("threads");
  key.erase("config");
  io::Manifest mf;
  mf.experiment = e;
  mf.config_hash = io::hex64(io::fnv1a(inputs_, io::fnv1a(key.dump())));
  mf.seed = static_cast<std::uint64_t>(c_.integer("seed"));
  mf.threads = used;
  mf.units = c_.text("units");
  mf.outputs = outputs_;
  mf.timings = timings_;
  io::write_text((out_ / "manifest.json").string(), io::manifest_json(mf));
  return status;
}

//! Relative paths inside a config file resolve against its directory.
json load_config(const std::string &path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::parse_error &e) {
    throw SchemaError("", std::string("config: ") + e.what());
  }
  if (!j.is_object())
    throw SchemaError("", "config: expected an object");
  const fs::path base = fs::path(path).parent_path();
  for (const char *k : {"model", "pulses", "out"})
    if (j.contains(k) && j[k].is_string() && fs::path(j[k].get<std::string>()).is_relative())
      j[k] = (base / j[k].get<std::string>()).lexically_normal().string();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto &ps = params();
    if (std::none_of(ps.begin(), ps.end(), [&](const Param &p) { return it.key() == p.key; }))
      throw SchemaError("/" + it.key(), "unknown config key");
  }
  return j;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Photoelectron circular dichroism: anisotropy parameters, PECD maps, pulse control"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; explicit flags override it")->check(CLI::ExistingFile);

  std::map<std::string, std::string> raw;
  for (const auto &p : params()) {
    if (std::string(p.key) == "suite")
      continue;
    std::string help = p.help;
    if (!p.fallback.is_null())
      help += (help.empty() ? "" : " ") + std::string("[") + (p.fallback.is_string() ? p.fallback.get<std::string>() : p.fallback.dump()) + "]";
    app.add_option(flag(p.key), raw[p.key], help);
  }
  std::map<std::string, CLI::App *> subs;
  for (const auto &e : kExperiments) {
    auto *s = app.add_subcommand(e, "run the " + e + " experiment");
    s->fallthrough();
    subs[e] = s;
  }
  subs["verify"]->add_option("suite", raw["suite"], "angular|betas|symmetry|scaling|chirality|observables|propagation|all");

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = json::object();
    for (const auto &p : params())
      cfg[p.key] = p.fallback;
    if (!config_path.empty()) {
      const json file = load_config(config_path);
      for (const auto &[k, v] : file.items())
        cfg[k] = v;
    }
    for (const auto &p : params()) {
      const bool given = std::string(p.key) == "suite" ? subs["verify"]->count("suite") > 0
                                                       : app.count(flag(p.key)) > 0;
      if (given)
        cfg[p.key] = convert(p, raw[p.key]);
    }
    for (const auto &[name, sub] : subs)
      if (sub->parsed()) {
        if (app.count("--experiment") && cfg["experiment"] != name)
          throw ConfigError("--experiment conflicts with the subcommand");
        cfg["experiment"] = name;
      }
    if (cfg["experiment"].is_null())
      throw ConfigError("no experiment given (subcommand, --experiment or config)");

    std::string bytes;
    for (const char *k : {"model", "pulses"})
      if (cfg[k].is_string())
        bytes += io::read_text(cfg[k].get<std::string>());
    Run run(Config(cfg), bytes);
    return run.execute();
  } catch (const SchemaError &e) {
    std::cerr << "error: schema: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError &e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 3;
  } catch (const Error &e) {
    std::cerr << "error: numerics: " << e.what() << "\n";
    return 4;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 70;
  }
}
