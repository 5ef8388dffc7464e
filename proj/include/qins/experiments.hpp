#pragma once

#include "qins/config.hpp"
#include "qins/diagnostics.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace qins {

/// One named hard assertion.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<Check> checks;
  bool pass() const;
  void add(std::string name, bool pass, std::string detail);
  void print(std::ostream& os) const;
};

/// First `count` distinct |k|^2 > 0 values on the grid.
std::vector<double> lowest_modes(const Grid& grid, int count);

struct SpectrumOutcome {
  ExperimentResult result;
  std::vector<SpectrumMatch> rows;
  double max_rel_err = 0.0;
  bool overdamped = false;
  std::vector<double> sweep_a0;
  std::vector<double> sweep_angle;
};

/// Constant-coefficient spectrum against the per-mode quadratic, plus the a0 sweep.
SpectrumOutcome run_spectrum(const RunConfig& cfg);

struct LincheckOutcome {
  ExperimentResult result;
  H12Report h12;
  std::vector<ResolventSample> resolvent;
  LowerOrderReport lower;
  EquivalenceReport equivalence;
  double spectral_angle = 0.0;
};

LincheckOutcome run_lincheck(const RunConfig& cfg);

struct SimulateOutcome {
  ExperimentResult result;
  SimulationResult sim;
  std::vector<DiagnosticsRow> diagnostics;
  double mass_drift = 0.0;
  DivIdentityReport div_identity;
  double max_abs_mean_mu0 = 0.0;
};

/// Run picard::simulate; when `write_outputs`, emit snapshots and CSVs under output.dir.
SimulateOutcome run_simulate(const RunConfig& cfg, bool write_outputs = true);

struct ContractionRow {
  double window_T = 0.0;
  bool converged = false;
  int iterations = 0;
  double q_hat = 0.0;
  std::string failure;
};

struct ContractionOutcome {
  ExperimentResult result;
  std::vector<ContractionRow> rows;
};

ContractionOutcome run_contraction(const RunConfig& cfg);
void write_contraction_csv(std::ostream& os, const std::vector<ContractionRow>& rows);

}  // namespace qins
