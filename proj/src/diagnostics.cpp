#include "qins/diagnostics.hpp"

#include "qins/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qins {

double mass_total(const ScalarField& c, const PhysParams& p) {
  return rho_hat(c, p).values().sum() * c.grid().cell_area();
}

double mass_drift(const Trajectory& traj, const PhysParams& p) {
  if (traj.states.empty()) return 0.0;
  const double m0 = mass_total(traj.states.front().c, p);
  double d = 0.0;
  for (const MaterialState& s : traj.states) d = std::max(d, std::abs(mass_total(s.c, p) - m0));
  return d / m0;
}

double div_identity_structural(const VectorField& v, const PhysParams& p) {
  const ScalarField dv = div(v);
  const ScalarField mu0 = chem_potential_mu0(v, p);
  return norm(dv - p.beta * laplacian(mu0)) / std::max(norm(dv), 1e-14);
}

std::vector<double> lt2_step_residuals(const Trajectory& traj, const PhysParams& p) {
  const std::size_t n = traj.states.size();
  if (n < 2) throw std::invalid_argument("LT2 residual needs at least two time samples");
  auto spatial = [&](const MaterialState& s) {
    const ScalarField rho = rho_hat(s.c, p);
    const VectorField gc = grad(s.c);
    return pointwise_product(rho, pointwise_product(s.v[0], gc[0]) +
                                      pointwise_product(s.v[1], gc[1])) -
           (1.0 / p.beta) * div(s.v);
  };
  std::vector<double> out;
  out.reserve(n - 1);
  ScalarField prev = spatial(traj.states[0]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const MaterialState& a = traj.states[k];
    const MaterialState& b = traj.states[k + 1];
    const double dt = traj.t[k + 1] - traj.t[k];
    ScalarField next = spatial(b);
    const ScalarField rho_w = 0.5 * (rho_hat(a.c, p) + rho_hat(b.c, p));
    const ScalarField r =
        pointwise_product(rho_w, (1.0 / dt) * (b.c - a.c)) + 0.5 * (prev + next);
    out.push_back(norm(r));
    prev = std::move(next);
  }
  return out;
}

DivIdentityReport div_identity_residual(const Trajectory& traj, const PhysParams& p) {
  DivIdentityReport r;
  for (const MaterialState& s : traj.states)
    r.structural = std::max(r.structural, div_identity_structural(s.v, p));
  for (double x : lt2_step_residuals(traj, p)) r.lt2 = std::max(r.lt2, x);
  return r;
}

std::vector<DiagnosticsRow> diagnostics_series(const Trajectory& traj, const PhysParams& p,
                                               int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const std::vector<double> lt2 =
      traj.states.size() >= 2 ? lt2_step_residuals(traj, p) : std::vector<double>{};
  std::vector<DiagnosticsRow> rows;
  for (std::size_t k = 0; k < traj.states.size(); k += static_cast<std::size_t>(stride)) {
    const MaterialState& s = traj.states[k];
    DiagnosticsRow r;
    r.time = traj.t[k];
    r.mass = mass_total(s.c, p);
    r.e_kin = kinetic_energy(s, p);
    r.e_free = free_energy(s.c, p);
    r.e_total = r.e_kin + r.e_free;
    if (!lt2.empty()) r.lt2_residual = lt2[k == 0 ? 0 : k - 1];
    r.div_identity = div_identity_structural(s.v, p);
    r.mean_mu0 = mean(chem_potential_mu0(s.v, p));
    r.max_abs_c = max_abs(s.c);
    rows.push_back(r);
  }
  return rows;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << "time,mass,e_kin,e_free,e_total,lt2_residual,div_identity,mean_mu0,max_abs_c\n";
  os.precision(16);
  for (const DiagnosticsRow& r : rows) {
    os << r.time << ',' << r.mass << ',' << r.e_kin << ',' << r.e_free << ',' << r.e_total << ','
       << r.lt2_residual << ',' << r.div_identity << ',' << r.mean_mu0 << ',' << r.max_abs_c
       << '\n';
  }
}

std::vector<EnergyRow> energy_series(const Trajectory& traj, const PhysParams& p) {
  if (traj.states.empty()) throw std::invalid_argument("energy series of an empty trajectory");
  std::vector<EnergyRow> rows;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const MaterialState& s = traj.states[k];
    EnergyRow r{traj.t[k], kinetic_energy(s, p), free_energy(s.c, p), 0.0, 0.0};
    r.e_total = r.e_kin + r.e_free;
    if (!rows.empty()) r.de_total = r.e_total - rows.back().e_total;
    rows.push_back(r);
  }
  return rows;
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyRow>& rows) {
  os << "t,e_kin,e_free,e_total,de_total\n";
  os.precision(16);
  for (const EnergyRow& r : rows)
    os << r.t << ',' << r.e_kin << ',' << r.e_free << ',' << r.e_total << ',' << r.de_total
       << '\n';
}

double max_energy_increase(const std::vector<EnergyRow>& rows) {
  if (rows.empty()) return 0.0;
  double m = 0.0;
  for (const EnergyRow& r : rows) m = std::max(m, r.de_total);
  const double e0 = rows.front().e_total;
  return e0 == 0.0 ? m : m / std::abs(e0);
}

InequalityReport inequality_suite(const Grid& grid, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  InequalityReport r;
  r.samples = samples;
  r.min_interpolation_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const ScalarField f = mean_project(random_smooth(grid, kScalarSym, rng, 6, 0.7));
    const ScalarField g = mean_project(random_smooth(grid, kScalarSym, rng, 6, 0.7));
    const double l2sq = inner_L2(f, f);
    const double grad_f = norm(grad(f));
    const double slack = (norm(f, Space::Hm1) * grad_f - l2sq) / l2sq;
    if (slack < -1e-12) ++r.interpolation_violations;
    r.min_interpolation_slack = std::min(r.min_interpolation_slack, slack);

    const VectorField a = grad(neumann_laplacian_solve(mean_project(-laplacian(f))));
    const VectorField b = grad(neumann_laplacian_solve(g));
    const double err = std::abs(inner_L2(a, b) - inner_L2(f, g)) / (grad_f * norm(b));
    r.max_duality_error = std::max(r.max_duality_error, err);

    const double q = korn_ratio(rigid_projection(random_smooth_vector(grid, rng, 6, 0.7)));
    if (std::isnan(q)) {
      ++r.korn_skipped;
    } else if (std::isfinite(q)) {
      ++r.korn_finite;
      r.korn_max = std::max(r.korn_max, q);
    }
  }
  return r;
}

}  // namespace qins
