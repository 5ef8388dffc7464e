#pragma once

#include "qins/krylov.hpp"
#include "qins/linop.hpp"

#include <string>
#include <vector>

namespace qins {

/// d/dt u + (A + B) u = f, u(0) = u0, integrated by the theta-scheme.
struct LinearProblem {
  /// One entry (frozen) or one per step, sampled at t_n + theta dt.
  std::vector<LinearizedCoefficients> coeff;
  /// Forcing at t_n + theta dt, one per step; empty means zero.
  std::vector<BlockState> f;
  BlockState u0;
  double dt = 0.0;
  int steps = 0;
  double theta = 0.5;
  double t0 = 0.0;
  GmresOptions solver;

  const LinearizedCoefficients& coeff_at(int n) const;
  void validate() const;
};

struct BlockTrajectory {
  std::vector<double> t;
  std::vector<BlockState> u;
};

struct StepStats {
  int iterations = 0;
  double rel_residual = 0.0;
  double drift = 0.0;  // size of the invariant correction after the solve
};

/// One theta step from u_n to u_{n+1}; throws std::runtime_error when the Krylov solve fails.
BlockState step_theta(const BlockState& u_n, const LinearProblem& problem, int n,
                      StepStats* stats = nullptr);

BlockTrajectory solve_linear_window(const LinearProblem& problem);

/// Assemble block data from primitive forcing: f = (f2, div_n f1, P_sigma f1),
/// u0 = (c0', div_n v0, P_sigma v0).
LinearProblem primitive_problem(std::vector<LinearizedCoefficients> coeff,
                                const std::vector<VectorField>& f1,
                                const std::vector<ScalarField>& f2, const VectorField& v0,
                                const ScalarField& c0_prime, double dt, int steps,
                                double theta = 0.5);

/// ||(dt v, grad^2 v)||_{L2(Q_T)} + ||v(0)||_H1 with differenced time derivatives.
double xt1_norm(const std::vector<double>& t, const std::vector<VectorField>& v);
/// ||(c, dt c, dt grad c, grad^3 c)||_{L2(Q_T)} + ||c(0)||_H2.
double xt2_norm(const std::vector<double>& t, const std::vector<ScalarField>& c);

struct XtYtNorms {
  double xt1 = 0.0;
  double xt2 = 0.0;
  double yt = 0.0;  // zero when no data is supplied
};

/// X_T norms of the reconstructed (v, c') trajectory and the Y_T norm of the data.
XtYtNorms xt_yt_norms(const BlockTrajectory& traj, const LinearProblem* data = nullptr);

/// Material trajectory (v, c) sampled in time.
struct Trajectory {
  std::vector<double> t;
  std::vector<MaterialState> states;
};

/// One snapshot file per `stride` samples plus index.csv (step, time, snapshot_file).
void export_trajectory(const Trajectory& traj, const std::string& dir, int stride);

}  // namespace qins
