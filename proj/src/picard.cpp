#include "qins/picard.hpp"

#include "qins/elliptic.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qins {

namespace {

using Mul = ScalarField (*)(const ScalarField&, const ScalarField&);

ScalarField dot(const VectorField& a, const VectorField& b, Mul mul) {
  return mul(a[0], b[0]) + mul(a[1], b[1]);
}

// (a.grad) u
VectorField advect(const VectorField& a, const VectorField& u, Mul mul) {
  VectorField r(u.grid());
  for (int i = 0; i < 2; ++i) r[i] = mul(a[0], partial(u[i], 0)) + mul(a[1], partial(u[i], 1));
  return r;
}

VectorField scale(const ScalarField& s, const VectorField& v, Mul mul) {
  return VectorField(mul(s, v[0]), mul(s, v[1]));
}

// Row contraction (g . S)_i = sum_j g_j S_ji for symmetric S.
VectorField contract(const VectorField& g, const TensorField& s, Mul mul) {
  return VectorField(mul(g[0], s.xx) + mul(g[1], s.xy), mul(g[0], s.xy) + mul(g[1], s.yy));
}

void check_finite(const ScalarField& f, const char* term) {
  if (!f.values().allFinite())
    throw std::runtime_error(std::string("non-finite value in term ") + term);
}

void check_finite(const VectorField& v, const char* term) {
  check_finite(v[0], term);
  check_finite(v[1], term);
}

ScalarField lerp(const ScalarField& a, const ScalarField& b, double th) {
  return (1.0 - th) * a + th * b;
}

VectorField lerp(const VectorField& a, const VectorField& b, double th) {
  return (1.0 - th) * a + th * b;
}

BlockState lerp(const BlockState& a, const BlockState& b, double th) {
  return (1.0 - th) * a + th * b;
}

ScalarField div_G(const VectorField& v) { return g_operator(div_n(v)); }

double sq(double x) { return x * x; }

}  // namespace

void PicardConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("time.dt must be positive");
  if (!(window_T >= dt)) throw std::invalid_argument("picard.window must be >= time.dt");
  if (!(tol > 0.0)) throw std::invalid_argument("picard.tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("picard.max_iter must be >= 1");
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("picard.theta must lie in [1/2, 1]");
}

NodeForcing forcing_terms(const MaterialState& s, const ScalarField& c_tilde0,
                          const PhysParams& p) {
  const Mul mul = &product;
  const ScalarField& c = s.c;
  const VectorField& v = s.v;
  const double b = p.beta;
  const ScalarField rho = rho_hat(c, p);
  const ScalarField rinv = map(c, [&](double x) { return 1.0 / rho_hat(x, p); });
  const ScalarField rm2 = map(c, [&](double x) { return std::pow(rho_hat(x, p), -2.0); });
  const ScalarField rm4 = map(c, [&](double x) { return std::pow(rho_hat(x, p), -4.0); });
  const ScalarField G = div_G(v);
  const VectorField gc = grad(c);

  const VectorField t1 = (1.0 / b) * scale(G, gc, mul);
  check_finite(t1, "G grad c / beta");

  const ScalarField inner = mul(phi(c), rm2) - (1.0 / b) * mul(G, rinv) +
                            p.epsilon * dot(grad(rm2), gc, mul);
  const VectorField t2 = (1.0 / b) * grad(inner);
  check_finite(t2, "grad(phi rho^-2 - G/(beta rho) + eps grad rho^-2 . grad c) / beta");

  const ScalarField lift = mul(rho, c_tilde0);
  const VectorField t3 =
      (-p.epsilon / (p.alpha * b)) * grad(div(scale(rm4, grad(lift), mul)));
  check_finite(t3, "lift remainder grad div(rho^-4 grad(rho c~0))");

  const VectorField t4 = -advect(v, v, mul);
  check_finite(t4, "v.grad v");

  const TensorField S = stress(c, v, p, false, ProductRule::Dealiased);
  const VectorField t5 = -contract(grad(rinv), S, mul);
  check_finite(t5, "grad rho^-1 . S");

  ScalarField f2 = -mul(rho, dot(v, gc, mul));
  check_finite(f2, "rho v.grad c");
  return NodeForcing{t1 + t2 + t3 + t4 + t5, std::move(f2)};
}

std::vector<PrimitiveForcing> build_F(const Trajectory& traj, const ScalarField& c_tilde0,
                                      const PhysParams& p, double theta) {
  const std::size_t n = traj.states.size();
  if (n < 2) throw std::invalid_argument("build_F needs at least two time levels");
  std::vector<NodeForcing> nodes;
  nodes.reserve(n);
  for (const MaterialState& s : traj.states) nodes.push_back(forcing_terms(s, c_tilde0, p));
  std::vector<PrimitiveForcing> out;
  out.reserve(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dt = traj.t[k + 1] - traj.t[k];
    const ScalarField& c0 = traj.states[k].c;
    const ScalarField& c1 = traj.states[k + 1].c;
    const ScalarField drho = (1.0 / dt) * (rho_hat(c1, p) - rho_hat(c0, p));
    const ScalarField dev = lerp(c0 - c_tilde0, c1 - c_tilde0, theta);
    ScalarField f2 = lerp(nodes[k].f2_transport, nodes[k + 1].f2_transport, theta) +
                     pointwise_product(drho, dev);
    out.push_back(PrimitiveForcing{lerp(nodes[k].f1, nodes[k + 1].f1, theta), std::move(f2)});
  }
  return out;
}

MaterialState apply_S(const VectorField& v_prime, const ScalarField& c_prime, const ScalarField& c,
                      const ScalarField& c_tilde0, const PhysParams& p) {
  ScalarField out(c.grid(), c_prime.values() / rho_hat(c, p).values() + c_tilde0.values());
  return MaterialState{v_prime, std::move(out)};
}

LtResidual lt_residual(const MaterialState& s, const VectorField& dv_dt, const ScalarField& dc_dt,
                       const PhysParams& p) {
  const Mul mul = &pointwise_product;
  const ScalarField& c = s.c;
  const VectorField& v = s.v;
  const double b = p.beta;
  const ScalarField rho = rho_hat(c, p);
  const ScalarField rinv = map(c, [&](double x) { return 1.0 / rho_hat(x, p); });
  const ScalarField rm2 = map(c, [&](double x) { return std::pow(rho_hat(x, p), -2.0); });
  const ScalarField G = div_G(v);
  const TensorField S = stress(c, v, p, false, ProductRule::Collocation);
  VectorField r1 = dv_dt + advect(v, v, mul) - scale(rinv, div(S), mul) +
                   (1.0 / b) * grad(mul(rm2, p.epsilon * laplacian(c) - phi(c))) -
                   (1.0 / b) * scale(G, grad(c), mul) + (1.0 / (b * b)) * grad(mul(rinv, G));
  ScalarField r2 = mul(rho, dc_dt) + mul(rho, dot(v, grad(c), mul)) - (1.0 / b) * div(v);
  return LtResidual{std::move(r1), std::move(r2)};
}

LtResidual abstract_residual(const MaterialState& s, const VectorField& dv_dt,
                             const ScalarField& dc_dt, const ScalarField& c_tilde0,
                             const PhysParams& p) {
  const ScalarField rho = rho_hat(s.c, p);
  const ScalarField dev = s.c - c_tilde0;
  const ScalarField c_prime = pointwise_product(rho, dev);
  const ScalarField drho_dt = pointwise_product(drho_dc(s.c, p), dc_dt);
  const ScalarField dcp_dt = pointwise_product(drho_dt, dev) + pointwise_product(rho, dc_dt);
  const LinearizedCoefficients k = LinearizedCoefficients::from_state(s.c, p);
  const PrimitivePair L = apply_spatial_L(s.v, c_prime, k);
  const NodeForcing F = forcing_terms(s, c_tilde0, p);
  const ScalarField f2 = F.f2_transport + pointwise_product(drho_dt, dev);
  return LtResidual{dv_dt + L.r1 - F.f1, dcp_dt + L.r2 - f2};
}

TrajectoryResidual trajectory_residual(const Trajectory& traj, const PhysParams& p,
                                       double theta) {
  const std::size_t n = traj.states.size();
  if (n < 2) throw std::invalid_argument("residual needs at least two time levels");
  const Grid& grid = traj.states.front().c.grid();
  const VectorField zero_v(grid);
  const ScalarField zero_c(grid);
  std::vector<LtResidual> spatial;
  spatial.reserve(n);
  for (const MaterialState& s : traj.states) spatial.push_back(lt_residual(s, zero_v, zero_c, p));

  double r1sq = 0.0, r2sq = 0.0, s1sq = 0.0, s2sq = 0.0;
  TrajectoryResidual out;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dt = traj.t[k + 1] - traj.t[k];
    const MaterialState& a = traj.states[k];
    const MaterialState& b = traj.states[k + 1];
    const VectorField dv = (1.0 / dt) * (b.v - a.v);
    const VectorField m1 = lerp(spatial[k].r1, spatial[k + 1].r1, theta);
    const ScalarField rho_w = (1.0 - theta) * rho_hat(b.c, p) + theta * rho_hat(a.c, p);
    const ScalarField dc = pointwise_product(rho_w, (1.0 / dt) * (b.c - a.c));
    const ScalarField m2 = lerp(spatial[k].r2, spatial[k + 1].r2, theta);
    const double e1 = norm(dv + m1), e2 = norm(dc + m2);
    r1sq += dt * sq(e1);
    r2sq += dt * sq(e2);
    s1sq += dt * (sq(norm(dv)) + sq(norm(m1)));
    s2sq += dt * (sq(norm(dc)) + sq(norm(m2)));
    out.lt2_abs_max = std::max(out.lt2_abs_max, e2);
  }
  out.lt1 = r1sq == 0.0 ? 0.0 : std::sqrt(r1sq / std::max(s1sq, 1e-300));
  out.lt2 = r2sq == 0.0 ? 0.0 : std::sqrt(r2sq / std::max(s2sq, 1e-300));
  return out;
}

double xt_norm(const Trajectory& traj) {
  std::vector<VectorField> v;
  std::vector<ScalarField> c;
  v.reserve(traj.states.size());
  c.reserve(traj.states.size());
  for (const MaterialState& s : traj.states) {
    v.push_back(s.v);
    c.push_back(s.c);
  }
  return xt1_norm(traj.t, v) + xt2_norm(traj.t, c);
}

double xt_distance(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) throw std::invalid_argument("trajectory lengths differ");
  Trajectory d{a.t, {}};
  d.states.reserve(a.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    d.states.push_back(MaterialState{a.states[k].v - b.states[k].v, a.states[k].c - b.states[k].c});
  const double num = xt_norm(d);
  if (num == 0.0) return 0.0;
  const double den = xt_norm(a);
  return den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
}

void write_picard_csv(std::ostream& os, const std::vector<PicardIteration>& rows) {
  os << "window_index,iteration,xt_distance,contraction_estimate,residual_LT1,residual_LT2\n";
  os.precision(10);
  for (const PicardIteration& r : rows) {
    os << r.window_index << ',' << r.iteration << ',' << r.xt_distance << ','
       << r.contraction_estimate << ',' << r.residual_LT1 << ',' << r.residual_LT2 << '\n';
  }
}

Trajectory picard_map(const Trajectory& u, const ScalarField& c_tilde0, const PicardConfig& cfg,
                      const PhysParams& p) {
  const std::size_t n = u.states.size();
  const int steps = static_cast<int>(n) - 1;
  const double th = cfg.theta;
  const double dt = u.t[1] - u.t[0];

  std::vector<BlockState> ub, kb;
  ub.reserve(n);
  kb.reserve(n);
  for (const MaterialState& s : u.states) {
    const ScalarField cp = pointwise_product(rho_hat(s.c, p), s.c - c_tilde0);
    const LinearizedCoefficients k = LinearizedCoefficients::from_state(s.c, p);
    const PrimitivePair L = apply_spatial_L(s.v, cp, k);
    ub.push_back(to_block(s.v, cp));
    kb.push_back(to_block(L.r1, L.r2));
  }

  std::vector<LinearizedCoefficients> coeff;
  if (cfg.coefficient_mode == CoefficientMode::FrozenAtWindowStart) {
    coeff.push_back(LinearizedCoefficients::from_state(c_tilde0, p));
  } else {
    coeff.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k)
      coeff.push_back(LinearizedCoefficients::from_state(
          lerp(u.states[k].c, u.states[k + 1].c, th), p));
  }

  const std::vector<PrimitiveForcing> F = build_F(u, c_tilde0, p, th);
  LinearProblem pb{coeff, {}, to_block(u.states.front().v, ScalarField(c_tilde0.grid())),
                   dt, steps, th, u.t.front(), {}};
  pb.f.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const BlockState avg = lerp(ub[k], ub[k + 1], th);
    BlockState f = to_block(F[k].f1, F[k].f2) + apply_generator(avg, pb.coeff_at(k), false) -
                   lerp(kb[k], kb[k + 1], th);
    f.g = mean_project(f.g);
    pb.f.push_back(std::move(f));
  }

  const BlockTrajectory sol = solve_linear_window(pb);
  Trajectory out{u.t, {}};
  out.states.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    out.states.push_back(apply_S(reconstruct_velocity(sol.u[k]), sol.u[k].c_prime,
                                 u.states[k].c, c_tilde0, p));
  return out;
}

WindowResult fixed_point_solve(const MaterialState& initial, const PicardConfig& cfg,
                               const PhysParams& p, double t0, int window_index) {
  cfg.validate();
  p.validate();
  const int steps = static_cast<int>(std::lround(cfg.window_T / cfg.dt));
  if (steps < 2) throw std::invalid_argument("a Picard window needs at least two time steps");
  const double band = 1.0 + p.eps0;
  if (max_abs(initial.c) > 1.0)
    spdlog::warn("window {}: max |c0| = {:.6f} exceeds 1", window_index, max_abs(initial.c));

  const ScalarField& c_tilde0 = initial.c;
  Trajectory u;
  for (int k = 0; k <= steps; ++k) {
    u.t.push_back(t0 + k * cfg.dt);
    u.states.push_back(initial);
  }

  WindowResult res{u, {}};
  PicardReport& rep = res.report;
  try {
    if (cfg.guess == InitialGuess::LiftThenMap) u = picard_map(u, c_tilde0, cfg, p);
    const double ref = std::max(xt_norm(u), 1e-300);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int m = 1; m <= cfg.max_iter; ++m) {
      Trajectory next = picard_map(u, c_tilde0, cfg, p);
      const double dist = xt_distance(next, u);
      const TrajectoryResidual r = trajectory_residual(next, p, cfg.theta);
      PicardIteration row{window_index, m, dist, std::numeric_limits<double>::quiet_NaN(), r.lt1,
                          r.lt2};
      if (prev > cfg.noise_floor && dist > cfg.noise_floor) {
        row.contraction_estimate = dist / prev;
        rep.q_hat = row.contraction_estimate;
      }
      rep.iterations.push_back(row);
      spdlog::debug("window {} iteration {}: distance {:.3e}", window_index, m, dist);
      prev = dist;
      u = std::move(next);
      rep.iteration_count = m;
      if (dist <= cfg.tol) {
        rep.converged = true;
        break;
      }
      if (!std::isfinite(dist) || xt_norm(u) > cfg.blowup_factor * ref) {
        rep.failure = "blow-up: iterate norm grew beyond " + std::to_string(cfg.blowup_factor) +
                      "x the initial guess";
        break;
      }
    }
    if (!rep.converged && rep.failure.empty())
      rep.failure = "max_iter reached with contraction estimate " + std::to_string(rep.q_hat) +
                    "; shrink the window";
  } catch (const std::exception& e) {
    rep.failure = e.what();
  }
  double cmax = 0.0;
  for (const MaterialState& s : u.states) cmax = std::max(cmax, max_abs(s.c));
  if (cmax > band)
    spdlog::info("window {}: |c| reached {:.6f}, outside the exact density band", window_index,
                 cmax);
  res.traj = std::move(u);
  return res;
}

SimulationResult simulate(const MaterialState& initial, double total_T, const PicardConfig& cfg,
                          const PhysParams& p) {
  cfg.validate();
  p.validate();
  const int total = static_cast<int>(std::lround(total_T / cfg.dt));
  const int per_window = static_cast<int>(std::lround(cfg.window_T / cfg.dt));
  if (total < 2) throw std::invalid_argument("time.total must cover at least two steps");
  if (per_window < 2) throw std::invalid_argument("picard.window must cover at least two steps");

  SimulationResult out;
  out.traj.t.push_back(0.0);
  out.traj.states.push_back(initial);
  int done = 0, window_index = 0;
  while (done < total) {
    int ws = std::min(per_window, total - done);
    if (total - done - ws == 1) ws += 1;
    bool ok = false;
    std::string last_failure;
    for (int h = 0; h <= cfg.max_halvings && ws >= 2; ++h) {
      PicardConfig wc = cfg;
      wc.window_T = ws * cfg.dt;
      WindowResult wr = fixed_point_solve(out.traj.states.back(), wc, p, done * cfg.dt, window_index);
      out.report.insert(out.report.end(), wr.report.iterations.begin(), wr.report.iterations.end());
      if (wr.report.converged) {
        for (std::size_t k = 1; k < wr.traj.states.size(); ++k) {
          out.traj.t.push_back(wr.traj.t[k]);
          out.traj.states.push_back(std::move(wr.traj.states[k]));
        }
        done += ws;
        ok = true;
        break;
      }
      last_failure = wr.report.failure;
      ws /= 2;
      if (ws >= 2 && total - done - ws == 1) ws += 1;
      if (ws >= 2 && h < cfg.max_halvings)
        spdlog::warn("window {} failed ({}); retrying with {} steps", window_index, last_failure, ws);
    }
    if (!ok) {
      out.failure = "window " + std::to_string(window_index) + " at t = " +
                    std::to_string(done * cfg.dt) + " failed: " + last_failure;
      return out;
    }
    ++window_index;
  }
  out.completed = true;
  return out;
}

}  // namespace qins
