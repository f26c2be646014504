#pragma once
#include <cmath>
#include <numbers>

//! Atomic units internally; these are the only lab-unit conversions.
namespace pecd::units {

constexpr double hartree_eV = 27.211386;
constexpr double au_time_fs = 0.024188843;
//! I[W/cm^2] = intensity_au * E[a.u.]^2
constexpr double intensity_au = 3.50944758e16;

constexpr double pi = std::numbers::pi;

inline double eV_to_au(double e) { return e / hartree_eV; }
inline double au_to_eV(double e) { return e * hartree_eV; }
inline double fs_to_au(double t) { return t / au_time_fs; }
inline double au_to_fs(double t) { return t * au_time_fs; }
inline double field_from_intensity(double wcm2) {
  return std::sqrt(wcm2 / intensity_au);
}
inline double intensity_from_field(double e_au) {
  return intensity_au * e_au * e_au;
}

} // namespace pecd::units
