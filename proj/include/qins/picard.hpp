#pragma once

#include "qins/evolve.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace qins {

enum class CoefficientMode { FrozenAtWindowStart, UpdatedEachIteration };

/// u0 = (v0, c~0) held constant in time, or that lift mapped once by the Picard map.
enum class InitialGuess { Lift, LiftThenMap };

struct PicardConfig {
  double window_T = 0.01;
  double dt = 1e-3;
  double tol = 1e-10;
  int max_iter = 50;
  CoefficientMode coefficient_mode = CoefficientMode::FrozenAtWindowStart;
  InitialGuess guess = InitialGuess::Lift;
  double theta = 0.5;
  double blowup_factor = 100.0;
  double noise_floor = 1e-13;  // distances below this are not used for the contraction estimate
  int max_halvings = 5;

  void validate() const;
};

// Nonlinear right-hand side ------------------------------------------------

struct NodeForcing {
  VectorField f1;
  ScalarField f2_transport;  // -rho v.grad c; the d/dt rho (c - c~0) part needs two time levels
};

/// F1(v, c) and the transport part of the F2-row at one time level (dealiased products).
NodeForcing forcing_terms(const MaterialState& s, const ScalarField& c_tilde0, const PhysParams& p);

struct PrimitiveForcing {
  VectorField f1;
  ScalarField f2;
};

/// Forcing on each step at t_n + theta dt. The F2-row uses the discrete product rule
///   (rho_{n+1} - rho_n)/dt * avg(c - c~0), which makes the fixed point conserve c' = rho (c - c~0).
std::vector<PrimitiveForcing> build_F(const Trajectory& traj, const ScalarField& c_tilde0,
                                      const PhysParams& p, double theta = 0.5);

/// (v', c') -> (v', c' / rho_hat(c) + c~0) pointwise.
MaterialState apply_S(const VectorField& v_prime, const ScalarField& c_prime, const ScalarField& c,
                      const ScalarField& c_tilde0, const PhysParams& p);

// Residuals -----------------------------------------------------------------

struct LtResidual {
  VectorField r1;
  ScalarField r2;
};

/// Direct evaluation of the eliminated system at one instant, given time derivatives:
///   r1 = dv/dt + v.grad v - rho^-1 div S + (1/beta) grad(rho^-2 (eps Lap c - phi))
///        - (1/beta) G grad c + (1/beta^2) grad(rho^-1 G),
///   r2 = rho dc/dt + rho v.grad c - div v / beta,   G = G(div v).
LtResidual lt_residual(const MaterialState& s, const VectorField& dv_dt, const ScalarField& dc_dt,
                       const PhysParams& p);

/// L(c)(v, rho (c - c~0)) - F(v, c) at one instant.
LtResidual abstract_residual(const MaterialState& s, const VectorField& dv_dt,
                             const ScalarField& dc_dt, const ScalarField& c_tilde0,
                             const PhysParams& p);

struct TrajectoryResidual {
  double lt1 = 0.0;  // relative, L2(Q_T)
  double lt2 = 0.0;  // relative, L2(Q_T)
  double lt2_abs_max = 0.0;  // max over steps of ||r2||_L2
};

/// Step-centred residuals of the eliminated system along a trajectory:
/// time differences over each step, spatial terms theta-averaged.
TrajectoryResidual trajectory_residual(const Trajectory& traj, const PhysParams& p,
                                       double theta = 0.5);

// Fixed point ---------------------------------------------------------------

/// ||v||_{X^1} + ||c||_{X^2} of a material trajectory.
double xt_norm(const Trajectory& traj);
/// Relative X_T distance ||a - b|| / ||a||; 0 when both vanish.
double xt_distance(const Trajectory& a, const Trajectory& b);

struct PicardIteration {
  int window_index = 0;
  int iteration = 0;
  double xt_distance = 0.0;
  double contraction_estimate = 0.0;
  double residual_LT1 = 0.0;
  double residual_LT2 = 0.0;
};

struct PicardReport {
  std::vector<PicardIteration> iterations;
  bool converged = false;
  int iteration_count = 0;
  double q_hat = 0.0;
  std::string failure;
};

void write_picard_csv(std::ostream& os, const std::vector<PicardIteration>& rows);

/// One application of the Picard map on a window starting from traj.states.front().
Trajectory picard_map(const Trajectory& u, const ScalarField& c_tilde0, const PicardConfig& cfg,
                      const PhysParams& p);

struct WindowResult {
  Trajectory traj;
  PicardReport report;
};

/// Iterate the Picard map over [t0, t0 + window_T] from `initial`. On failure the report
/// carries the reason and `traj` holds the last iterate.
WindowResult fixed_point_solve(const MaterialState& initial, const PicardConfig& cfg,
                               const PhysParams& p, double t0 = 0.0, int window_index = 0);

struct SimulationResult {
  Trajectory traj;
  std::vector<PicardIteration> report;
  bool completed = false;
  std::string failure;
};

/// Chain windows over [0, total_T]; a failing window is retried with halved length.
SimulationResult simulate(const MaterialState& initial, double total_T, const PicardConfig& cfg,
                          const PhysParams& p);

}  // namespace qins
