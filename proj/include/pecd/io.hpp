#pragma once
#include "pecd/anisotropy.hpp"
#include "pecd/control.hpp"
#include "pecd/field.hpp"
#include "pecd/model.hpp"
#include "pecd/observables.hpp"
#include <cstdint>
#include <string>
#include <vector>

//! File formats: model and pulse JSON, CSV/JSON/gnuplot emitters, manifests.
/*!
  Model JSON (energies in the unit named by "units.energy", "au" or "eV";
  dipoles always atomic units; complex numbers are [re, im]):

    { "units": {"energy": "eV"},
      "homo_energy": -11.88, "lmax": 2,
      "energy_grid": [1.0, 1.2, ...],
      "ground_dipole": [[re,im], [re,im], [re,im]],          // mu = -1, 0, +1
      "bound_states": [{"energy": -4.0, "dipole_from_homo": [[..],[..],[..]]}],
      "continuum_from_homo": [ {"entries": [{"l":0,"m":0,"mu":-1,"value":[re,im]}, ...]}, ...],
      "continuum_from_bound": [ [ {"entries": [...]}, ... ], ... ] }

  Every energy row must list each (l <= lmax, |m| <= l, mu) channel exactly
  once. Violations raise SchemaError with a JSON-pointer path.

  Pulse JSON:

    { "units": {"amplitude": "au"|"W/cm2", "energy": "au"|"eV",
                "time": "au"|"fs", "phase": "rad"|"deg"},
      "mu0": 1,
      "pulses": [{"amplitude":..., "carrier":..., "cep":..., "fwhm":..., "delay":...}] }

  With "W/cm2" the amplitude entry is the peak intensity of that sub-pulse.
*/
namespace pecd::io {

enum class UnitSystem { au, lab };
UnitSystem parse_units(const std::string &s);

//! 12 significant digits, shortest form.
std::string fmt(double v);

std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &text);

model::MolecularModel model_from_json(const std::string &text);
std::string model_to_json(const model::MolecularModel &m, UnitSystem u = UnitSystem::au);
model::MolecularModel load_model(const std::string &path);
void save_model(const model::MolecularModel &m, const std::string &path, UnitSystem u = UnitSystem::au);

field::PulseTrain pulses_from_json(const std::string &text);
std::string pulses_to_json(const field::PulseTrain &t, UnitSystem u = UnitSystem::au);
field::PulseTrain load_pulses(const std::string &path);

//! columns pathway,L,M,energy,re,im (energy in eV for lab units)
std::string betas_csv(const anisotropy::BetaSet &b, UnitSystem u = UnitSystem::lab);
std::string betas_json(const anisotropy::BetaSet &b, UnitSystem u = UnitSystem::lab);

//! columns energy,theta,pecd (eV, deg, percent for lab units)
std::string pecd_csv(const observables::PECDMap &m, UnitSystem u = UnitSystem::lab);
std::string pecd_json(const observables::PECDMap &m, UnitSystem u = UnitSystem::lab);
//! gnuplot "matrix nonuniform": first row theta, first column energy
std::string pecd_gnuplot(const observables::PECDMap &m, UnitSystem u = UnitSystem::lab);

std::string scan_csv(const std::vector<control::ScanPoint> &s, UnitSystem u = UnitSystem::lab);
//! one matrix per panel, rows omega, columns dphi, each with a header row
std::string bichromatic_csv(const control::BichromaticMap &b, const std::vector<double> &panel,
                            UnitSystem u = UnitSystem::lab);
std::string history_json(const control::PulseOptimization &r, UnitSystem u = UnitSystem::lab);
std::string wigner_csv(const field::WignerMap &w, UnitSystem u = UnitSystem::lab);

//! 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string &bytes, std::uint64_t h = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

struct Manifest {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string units;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, double>> timings; // seconds
};
std::string manifest_json(const Manifest &m);

extern const char *const kVersion;

} // namespace pecd::io
