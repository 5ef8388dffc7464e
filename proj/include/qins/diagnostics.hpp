#pragma once

#include "qins/evolve.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace qins {

/// Integral of rho_hat(c) by the collocation rule.
double mass_total(const ScalarField& c, const PhysParams& p);
/// max_n |mass_n - mass_0| / mass_0.
double mass_drift(const Trajectory& traj, const PhysParams& p);

/// ||div v - beta Lap(G(div v)/beta)|| / max(||div v||, 1e-14).
double div_identity_structural(const VectorField& v, const PhysParams& p);

/// ||rho_w (c_{n+1} - c_n)/dt + avg(rho v.grad c) - avg(div v)/beta||_L2 on each step,
/// with rho_w = (rho_n + rho_{n+1})/2 (time differences centred on the step).
std::vector<double> lt2_step_residuals(const Trajectory& traj, const PhysParams& p);

struct DivIdentityReport {
  double structural = 0.0;  // max over samples
  double lt2 = 0.0;         // max over steps; needs two samples
};

DivIdentityReport div_identity_residual(const Trajectory& traj, const PhysParams& p);

struct DiagnosticsRow {
  double time = 0.0;
  double mass = 0.0;
  double e_kin = 0.0;
  double e_free = 0.0;
  double e_total = 0.0;
  double lt2_residual = 0.0;  // step ending at this sample; the first row reports the first step
  double div_identity = 0.0;
  double mean_mu0 = 0.0;
  double max_abs_c = 0.0;
};

std::vector<DiagnosticsRow> diagnostics_series(const Trajectory& traj, const PhysParams& p,
                                               int stride = 1);
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);

struct EnergyRow {
  double t = 0.0;
  double e_kin = 0.0;
  double e_free = 0.0;
  double e_total = 0.0;
  double de_total = 0.0;  // change since the previous row
};

std::vector<EnergyRow> energy_series(const Trajectory& traj, const PhysParams& p);
void write_energy_csv(std::ostream& os, const std::vector<EnergyRow>& rows);
/// max_n (E_{n+1} - E_n)^+ / E_0.
double max_energy_increase(const std::vector<EnergyRow>& rows);

struct InequalityReport {
  int samples = 0;
  int interpolation_violations = 0;
  double min_interpolation_slack = 0.0;  // min of (||f||_H-1 ||grad f|| - ||f||^2) / ||f||^2
  double max_duality_error = 0.0;        // |((-Lap) f, g)_H-1 - (f, g)| / (||grad f|| ||g||_H-1)
  int korn_finite = 0;
  int korn_skipped = 0;
  double korn_max = 0.0;
};

/// Interpolation inequality, H^-1 duality identity and Korn ratio over random smooth samples.
InequalityReport inequality_suite(const Grid& grid, int samples, std::uint64_t seed = 3);

}  // namespace qins
