#include "qins/evolve.hpp"

#include "qins/elliptic.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace qins {

namespace {

Eigen::VectorXd flatten(const BlockState& u) {
  const Eigen::Index n = u.g.values().size();
  Eigen::VectorXd x(4 * n);
  x.segment(0, n) = u.c_prime.values().matrix();
  x.segment(n, n) = u.g.values().matrix();
  x.segment(2 * n, n) = u.w[0].values().matrix();
  x.segment(3 * n, n) = u.w[1].values().matrix();
  return x;
}

BlockState unflatten(const Grid& grid, const Eigen::VectorXd& x) {
  const Eigen::Index n = grid.size();
  return BlockState{ScalarField(grid, x.segment(0, n).array()),
                    ScalarField(grid, x.segment(n, n).array()),
                    VectorField(ScalarField(grid, x.segment(2 * n, n).array(), vector_sym(0)),
                                ScalarField(grid, x.segment(3 * n, n).array(), vector_sym(1)))};
}

double mean_of(const ScalarField& f) { return f.values().mean(); }

// Per-mode inverse of I + theta dt A_avg, A_avg the generator with averaged coefficients.
struct Preconditioner {
  Grid grid;
  double tdt, s, abar, nubar, inv_beta;

  BlockState apply(const BlockState& u) const {
    Spectrum c = forward(u.c_prime);
    Spectrum g = forward(u.g);
    const int m1 = grid.work_points(0);
    for (int i = 0; i < m1; ++i) {
      const double k1 = grid.wavenumber(0, signed_mode(i, m1));
      for (int j = 0; j < c.m2h; ++j) {
        const double k2 = grid.wavenumber(1, j);
        const double kk = k1 * k1 + k2 * k2;
        const double p11 = 1.0, p12 = -tdt * inv_beta;
        const double p21 = tdt * s * kk * kk, p22 = 1.0 + tdt * abar * kk;
        const double det = p11 * p22 - p12 * p21;
        const std::complex<double> x = c.at(i, j), y = g.at(i, j);
        c.at(i, j) = (p22 * x - p12 * y) / det;
        g.at(i, j) = (-p21 * x + p11 * y) / det;
      }
    }
    VectorField w(grid);
    for (int a = 0; a < 2; ++a) {
      Spectrum sw = forward(u.w[a]);
      for (int i = 0; i < m1; ++i) {
        const double k1 = grid.wavenumber(0, signed_mode(i, m1));
        for (int j = 0; j < sw.m2h; ++j) {
          const double k2 = grid.wavenumber(1, j);
          sw.at(i, j) /= 1.0 + tdt * nubar * (k1 * k1 + k2 * k2);
        }
      }
      w[a] = inverse(grid, sw, vector_sym(a));
    }
    return BlockState{inverse(grid, c, kScalarSym), inverse(grid, g, kScalarSym), std::move(w)};
  }
};

double sq(double x) { return x * x; }

void require_samples(const std::vector<double>& t, std::size_t n) {
  if (t.size() != n) throw std::invalid_argument("time and state sample counts differ");
  if (n < 3) throw std::invalid_argument("X_T norms need at least 3 time samples");
}

// Trapezoid weights for samples at t.
std::vector<double> trapezoid(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t n = 0; n + 1 < t.size(); ++n) {
    const double h = t[n + 1] - t[n];
    w[n] += 0.5 * h;
    w[n + 1] += 0.5 * h;
  }
  return w;
}

double vec_energy(const VectorField& v, int order) {
  return derivative_energy(v[0], order) + derivative_energy(v[1], order);
}

}  // namespace

const LinearizedCoefficients& LinearProblem::coeff_at(int n) const {
  return coeff.size() == 1 ? coeff.front() : coeff.at(static_cast<std::size_t>(n));
}

void LinearProblem::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [1/2, 1]");
  if (coeff.empty() || (coeff.size() != 1 && coeff.size() != static_cast<std::size_t>(steps)))
    throw std::invalid_argument("coefficients: need 1 or `steps` samples");
  if (!f.empty() && f.size() != static_cast<std::size_t>(steps))
    throw std::invalid_argument("forcing: need `steps` samples");
  check_block_invariants(u0);
}

BlockState step_theta(const BlockState& u_n, const LinearProblem& pb, int n, StepStats* stats) {
  const LinearizedCoefficients& k = pb.coeff_at(n);
  const Grid& grid = u_n.g.grid();
  const double dt = pb.dt, th = pb.theta;

  BlockState rhs = u_n;
  if (th < 1.0) rhs -= ((1.0 - th) * dt) * apply_generator(u_n, k, false);
  if (!pb.f.empty()) rhs += dt * pb.f[static_cast<std::size_t>(n)];

  const double rho_m4 = mean_of(k.rho0_m4);
  const Preconditioner pc{grid,
                          th * dt,
                          k.params.epsilon / (k.params.alpha * k.params.beta) * rho_m4,
                          mean_of(k.a0),
                          mean_of(k.nu_t),
                          1.0 / k.params.beta};

  auto op = [&](const Eigen::VectorXd& x) {
    const BlockState u = unflatten(grid, x);
    return flatten(u + (th * dt) * apply_generator(u, k, false));
  };
  auto prec = [&](const Eigen::VectorXd& x) { return flatten(pc.apply(unflatten(grid, x))); };

  const GmresResult r = gmres(op, prec, flatten(rhs), flatten(u_n), pb.solver);
  if (!r.converged) {
    throw std::runtime_error("theta step " + std::to_string(n) +
                             ": Krylov solve stalled at relative residual " +
                             std::to_string(r.rel_residual) + " after " +
                             std::to_string(r.iterations) + " iterations");
  }
  BlockState u = unflatten(grid, r.x);
  const ScalarField g = mean_project(u.g);
  const VectorField w = helmholtz_project(u.w);
  const double drift = std::sqrt(sq(norm(u.g - g)) + sq(norm(u.w - w)));
  u.g = g;
  u.w = w;
  spdlog::debug("step {}: {} iterations, residual {:.3e}, invariant drift {:.3e}", n,
                r.iterations, r.rel_residual, drift);
  if (stats) *stats = StepStats{r.iterations, r.rel_residual, drift};
  return u;
}

BlockTrajectory solve_linear_window(const LinearProblem& pb) {
  pb.validate();
  BlockTrajectory traj;
  traj.t.reserve(static_cast<std::size_t>(pb.steps) + 1);
  traj.u.reserve(static_cast<std::size_t>(pb.steps) + 1);
  traj.t.push_back(pb.t0);
  traj.u.push_back(pb.u0);
  for (int n = 0; n < pb.steps; ++n) {
    traj.u.push_back(step_theta(traj.u.back(), pb, n));
    traj.t.push_back(pb.t0 + (n + 1) * pb.dt);
  }
  return traj;
}

LinearProblem primitive_problem(std::vector<LinearizedCoefficients> coeff,
                                const std::vector<VectorField>& f1,
                                const std::vector<ScalarField>& f2, const VectorField& v0,
                                const ScalarField& c0_prime, double dt, int steps, double theta) {
  if (f1.size() != f2.size()) throw std::invalid_argument("f1 and f2 sample counts differ");
  LinearProblem pb{std::move(coeff), {}, to_block(v0, c0_prime), dt, steps, theta, 0.0, {}};
  // to_block puts its scalar argument in the c' slot: (c0', div_n v0, P_sigma v0).
  pb.f.reserve(f1.size());
  for (std::size_t n = 0; n < f1.size(); ++n) pb.f.push_back(to_block(f1[n], f2[n]));
  return pb;
}

double xt1_norm(const std::vector<double>& t, const std::vector<VectorField>& v) {
  require_samples(t, v.size());
  const auto w = trapezoid(t);
  double acc = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) acc += w[n] * vec_energy(v[n], 2);
  for (std::size_t n = 0; n + 1 < v.size(); ++n) {
    const double h = t[n + 1] - t[n];
    acc += sq(norm(v[n + 1] - v[n])) / h;
  }
  return std::sqrt(acc) + norm(v.front(), Space::H1);
}

double xt2_norm(const std::vector<double>& t, const std::vector<ScalarField>& c) {
  require_samples(t, c.size());
  const auto w = trapezoid(t);
  double acc = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n)
    acc += w[n] * (inner_L2(c[n], c[n]) + derivative_energy(c[n], 3));
  for (std::size_t n = 0; n + 1 < c.size(); ++n) {
    const double h = t[n + 1] - t[n];
    acc += sq(norm(c[n + 1] - c[n], Space::H1)) / h;
  }
  return std::sqrt(acc) + norm(c.front(), Space::H2);
}

XtYtNorms xt_yt_norms(const BlockTrajectory& traj, const LinearProblem* data) {
  require_samples(traj.t, traj.u.size());
  std::vector<VectorField> v;
  std::vector<ScalarField> c;
  v.reserve(traj.u.size());
  c.reserve(traj.u.size());
  for (const BlockState& u : traj.u) {
    v.push_back(reconstruct_velocity(u));
    c.push_back(u.c_prime);
  }
  XtYtNorms out;
  out.xt1 = xt1_norm(traj.t, v);
  out.xt2 = xt2_norm(traj.t, c);
  if (data) {
    double acc = 0.0;
    for (const BlockState& f : data->f) {
      const double f1 = norm(reconstruct_velocity(f));
      const double f2 = norm(f.c_prime, Space::H1);
      acc += data->dt * (f1 * f1 + f2 * f2);
    }
    out.yt = std::sqrt(acc) + norm(reconstruct_velocity(data->u0), Space::H1) +
             norm(data->u0.c_prime, Space::H2);
  }
  return out;
}

void export_trajectory(const Trajectory& traj, const std::string& dir, int stride) {
  if (stride < 1) throw std::invalid_argument("output.stride must be >= 1");
  std::filesystem::create_directories(dir);
  std::ofstream index(std::filesystem::path(dir) / "index.csv");
  if (!index) throw std::runtime_error("cannot write " + dir + "/index.csv");
  index << "step,time,snapshot_file\n";
  index.precision(17);
  for (std::size_t n = 0; n < traj.states.size(); n += static_cast<std::size_t>(stride)) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.qins", n);
    write_snapshot((std::filesystem::path(dir) / name).string(), traj.states[n].c,
                   traj.states[n].v);
    index << n << ',' << traj.t[n] << ',' << name << '\n';
  }
}

}  // namespace qins
