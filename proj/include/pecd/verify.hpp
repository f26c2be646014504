#pragma once
#include "pecd/field.hpp"
#include "pecd/model.hpp"
#include "pecd/oracle.hpp"
#include <string>
#include <vector>

//! Analytic-vs-oracle comparisons grouped into named suites.
//! Every check reports the measured residual next to its tolerance.
namespace pecd::verify {

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

//! 3j orthogonality over every j1, j2 <= jmax (half-integers included) and
//! the Euler triple integral against direct D-function quadrature, l <= lmax.
Report angular_suite(int jmax = 10, int lmax = 3);

//! Analytic betas vs orientation quadrature (entry residual over the table
//! maximum) and threaded kernel vs serial twin, all three mu0.
Report betas_suite(const model::MolecularModel &m, const field::PulseTrain &train, int euler_nodes = 12);

//! Helicity reversal, structural (L, M) ranges.
Report symmetry_suite(const model::MolecularModel &m, const field::PulseTrain &train);

//! beta ratios under amplitude doubling.
Report scaling_suite(const model::MolecularModel &m, const field::PulseTrain &train);

//! Mirror-achiralized model: helicity difference over the distribution peak.
Report chirality_suite(const model::MolecularModel &m, const field::PulseTrain &train);

//! PECD map vs explicit subtraction, hemisphere antisymmetry, interference zeros.
Report observables_suite(const model::MolecularModel &m, const field::PulseTrain &train);

struct PropagationSetup {
  std::vector<double> intensities = {1e8, 1e9, 1e10};
  double first_order_intensity = 1e9;
  oracle::Orientation orientation{0.7, 1.1, -0.4};
  oracle::PropagationOptions options{1e-18, 1e-13, 8.0, 1e-6};
};
//! Residual slope of propagation minus the second-order expansion, and the
//! field-odd part at one intensity against the first-order amplitude.
Report propagation_suite(const model::MolecularModel &m, const field::PulseTrain &train,
                         const PropagationSetup &s = {});

std::vector<std::string> suite_names();
//! Runs one suite by name, or every suite for "all"; ConfigError otherwise.
std::vector<Report> run(const std::string &name, const model::MolecularModel &m,
                        const field::PulseTrain &train);

std::string report_text(const std::vector<Report> &r);
std::string report_json(const std::vector<Report> &r);

} // namespace pecd::verify
