#include "qins/experiments.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace qins {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

bool ExperimentResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void ExperimentResult::add(std::string name, bool ok, std::string detail) {
  checks.push_back(Check{std::move(name), ok, std::move(detail)});
}

void ExperimentResult::print(std::ostream& os) const {
  for (const Check& c : checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": ") << c.detail
       << '\n';
}

std::vector<double> lowest_modes(const Grid& grid, int count) {
  std::vector<double> k2 = scalar_basis_k2(grid, false);
  std::sort(k2.begin(), k2.end());
  std::vector<double> out;
  for (double x : k2) {
    if (!out.empty() && std::abs(x - out.back()) <= 1e-9 * x) continue;
    out.push_back(x);
    if (static_cast<int>(out.size()) == count) break;
  }
  return out;
}

SpectrumOutcome run_spectrum(const RunConfig& cfg) {
  SpectrumOutcome out;
  const Grid grid = cfg.grid();
  const PhysParams& p = cfg.params;
  const double a0 = cfg.spectrum_a0;
  const auto coeff = LinearizedCoefficients::constant_a0(grid, p, a0);
  const auto predicted = spectrum_constant_coeff(p, a0, lowest_modes(grid, cfg.spectrum_modes));
  const Eigen::VectorXcd eig = spectrum_numeric(coeff);
  out.rows = match_spectrum(grid, predicted, eig);

  bool mult_ok = true;
  for (const SpectrumMatch& m : out.rows) {
    out.max_rel_err = std::max(out.max_rel_err, m.rel_err);
    const bool double_root = std::abs(m.predicted_plus - m.predicted_minus) <=
                             1e-7 * std::abs(m.predicted_plus);
    if (!double_root && (m.found_plus != m.multiplicity || m.found_minus != m.multiplicity))
      mult_ok = false;
  }
  out.result.add("quadratic roots", out.max_rel_err < 1e-8 && mult_ok,
                 "max rel err " + fmt_double(out.max_rel_err) + " over " +
                     std::to_string(out.rows.size()) + " modes" +
                     (mult_ok ? "" : ", multiplicity mismatch"));

  const double scale = eig.cwiseAbs().maxCoeff();
  int zeros = 0;
  bool stable = true;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig[i]) <= 1e-10 * scale) {
      ++zeros;
    } else if (!(eig[i].real() < 0.0)) {
      stable = false;
    }
  }
  out.result.add("zero eigenvalue from constant c'", zeros == 1,
                 std::to_string(zeros) + " eigenvalue(s) at 0");
  out.result.add("nonzero modes damped", stable, "");

  out.overdamped = a0 * a0 * p.alpha * p.beta * p.beta >= 4.0 * p.epsilon;
  if (out.overdamped) {
    double max_im = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) max_im = std::max(max_im, std::abs(eig[i].imag()));
    out.result.add("overdamped: all eigenvalues real", max_im <= 1e-8 * scale,
                   "max |Im| " + fmt_double(max_im));
  }

  bool in_range = true, decreasing = true;
  for (double a : cfg.spectrum_a0_sweep) {
    const double ang =
        ray_angle(spectrum_numeric(LinearizedCoefficients::constant_a0(grid, p, a)));
    if (!(ang > std::numbers::pi / 2 && ang < std::numbers::pi)) in_range = false;
    if (!out.sweep_angle.empty() && !(ang < out.sweep_angle.back())) decreasing = false;
    out.sweep_a0.push_back(a);
    out.sweep_angle.push_back(ang);
  }
  if (!cfg.spectrum_a0_sweep.empty()) {
    std::string detail;
    for (std::size_t i = 0; i < out.sweep_a0.size(); ++i)
      detail += (i ? ", " : "") + fmt_double(out.sweep_a0[i]) + " -> " +
                fmt_double(out.sweep_angle[i]);
    out.result.add("ray angle in (pi/2, pi)", in_range, detail);
    out.result.add("ray angle decreases along the a0 sweep", decreasing, "");
  }
  return out;
}

LincheckOutcome run_lincheck(const RunConfig& cfg) {
  LincheckOutcome out;
  const Grid grid = cfg.grid();
  const PhysParams& p = cfg.params;
  const bool constant = cfg.lincheck_c0 == "constant";
  LinearizedCoefficients coeff = [&] {
    if (constant) return LinearizedCoefficients::constant_a0(grid, p, cfg.lincheck_a0);
    std::mt19937_64 rng(cfg.seed);
    ScalarField c0 = random_smooth(grid, kScalarSym, rng, 3, 0.5);
    c0 *= cfg.lincheck_amplitude / std::max(max_abs(c0), 1e-300);
    return LinearizedCoefficients::from_state(c0, p);
  }();

  out.h12 = check_H1_H2(coeff);
  const H12Report& h = out.h12;
  out.result.add("H1 symmetry of A and B", h.symmetry_err_A < 1e-10 && h.symmetry_err_B < 1e-10,
                 "errors " + fmt_double(h.symmetry_err_A) + ", " + fmt_double(h.symmetry_err_B));
  out.result.add("H1 positivity", h.min_eig_A > 0.0 && h.min_eig_B > 0.0,
                 "min eig A " + fmt_double(h.min_eig_A) + ", B " + fmt_double(h.min_eig_B));
  out.result.add("H2 bounds", h.rho1 > 0.0 && h.rho1 <= h.rho2 && std::isfinite(h.rho2),
                 "rho1 " + fmt_double(h.rho1) + ", rho2 " + fmt_double(h.rho2));
  if (constant) {
    const double expect = cfg.lincheck_a0 * std::sqrt(p.alpha * std::abs(p.beta) / p.epsilon);
    const bool ok = std::abs(h.rho1 - expect) <= 1e-8 * std::abs(expect) &&
                    std::abs(h.rho2 - expect) <= 1e-8 * std::abs(expect);
    out.result.add("H2 constant-coefficient ratio", ok, "expected " + fmt_double(expect));
  }

  const Eigen::VectorXcd eig = spectrum_numeric(coeff);
  double theta = ray_angle(eig);
  if (std::isnan(theta)) theta = std::numbers::pi;
  out.spectral_angle = theta;
  const std::vector<double> angles{0.0, 0.25 * theta, 0.5 * theta, 0.75 * theta};
  std::vector<double> radii;
  for (int e = -2; e <= 12; ++e) radii.push_back(std::pow(10.0, 0.5 * e));
  out.resolvent = resolvent_probe(coeff, angles, radii);
  double sup = 0.0, far = 0.0;
  int flagged = 0;
  bool finite = true;
  for (const ResolventSample& s : out.resolvent) {
    if (s.flagged) {
      ++flagged;
      continue;
    }
    if (!std::isfinite(s.scaled_norm)) finite = false;
    sup = std::max(sup, s.scaled_norm);
    if (s.angle == 0.0 && s.radius == radii.back()) far = s.scaled_norm;
  }
  out.result.add("resolvent bounded inside the sector", finite && flagged == 0 && sup < 1e3,
                 "sup |lambda| ||R|| = " + fmt_double(sup) + ", flagged " + std::to_string(flagged));
  out.result.add("resolvent at large real lambda", std::abs(far - 1.0) < 0.05,
                 "|lambda| ||R|| = " + fmt_double(far) + " at lambda = " + fmt_double(radii.back()));

  out.lower = lower_order_bounds(coeff, cfg.lincheck_samples, cfg.seed + 1);
  const LowerOrderReport& lo = out.lower;
  out.result.add("B1, B2 lower order",
                 std::isfinite(lo.b1_over_h1) && std::isfinite(lo.b1_over_h34) &&
                     std::isfinite(lo.b2_over_h12),
                 "max ||B1 g||/||g||_H1 " + fmt_double(lo.b1_over_h1) + ", /||g||_H3/4 " +
                     fmt_double(lo.b1_over_h34) + ", ||B2 g||_H-1/||g||_H1/2 " +
                     fmt_double(lo.b2_over_h12));

  out.equivalence = norm_equivalence(coeff, cfg.lincheck_samples, cfg.seed + 2);
  const EquivalenceReport& eq = out.equivalence;
  out.result.add("graph norm equivalence",
                 eq.min_ratio > 0.0 && std::isfinite(eq.max_ratio) && eq.min_ratio <= eq.max_ratio,
                 "ratio in [" + fmt_double(eq.min_ratio) + ", " + fmt_double(eq.max_ratio) + "]");
  return out;
}

SimulateOutcome run_simulate(const RunConfig& cfg, bool write_outputs) {
  SimulateOutcome out;
  const PhysParams& p = cfg.params;
  const MaterialState init = cfg.initial_state();
  out.sim = simulate(init, cfg.total, cfg.picard, p);
  const Trajectory& traj = out.sim.traj;

  out.diagnostics = diagnostics_series(traj, p, cfg.output_stride);
  out.mass_drift = mass_drift(traj, p);
  if (traj.states.size() >= 2) out.div_identity = div_identity_residual(traj, p);
  for (const MaterialState& s : traj.states)
    out.max_abs_mean_mu0 = std::max(out.max_abs_mean_mu0, std::abs(mean(chem_potential_mu0(s.v, p))));
  const auto energy = energy_series(traj, p);

  if (write_outputs) {
    const std::filesystem::path dir(cfg.output_dir);
    export_trajectory(traj, (dir / "snapshots").string(), cfg.output_stride);
    auto d = open_out(dir / "diagnostics.csv");
    write_diagnostics_csv(d, out.diagnostics);
    auto r = open_out(dir / "picard_report.csv");
    write_picard_csv(r, out.sim.report);
    auto e = open_out(dir / "energy.csv");
    write_energy_csv(e, energy);
  }

  const int steps = static_cast<int>(traj.states.size()) - 1;
  out.result.add("all windows converged", out.sim.completed,
                 out.sim.completed ? std::to_string(steps) + " steps" : out.sim.failure);
  out.result.add("mass drift", out.mass_drift < cfg.check_mass_drift,
                 fmt_double(out.mass_drift) + " (limit " + fmt_double(cfg.check_mass_drift) + ")");
  out.result.add("LT2' residual", out.div_identity.lt2 < cfg.check_lt2,
                 fmt_double(out.div_identity.lt2) + " (limit " + fmt_double(cfg.check_lt2) + ")");
  out.result.add("structural div identity", out.div_identity.structural < 1e-12,
                 fmt_double(out.div_identity.structural));
  out.result.add("mean(mu0)", out.max_abs_mean_mu0 < 1e-13, fmt_double(out.max_abs_mean_mu0));
  spdlog::info("max relative energy increase per step: {:.3e}", max_energy_increase(energy));
  return out;
}

ContractionOutcome run_contraction(const RunConfig& cfg) {
  ContractionOutcome out;
  const MaterialState init = cfg.initial_state();
  std::vector<double> windows = cfg.contraction_windows;
  std::sort(windows.begin(), windows.end(), std::greater<>());
  for (double T : windows) {
    PicardConfig pc = cfg.picard;
    pc.window_T = T;
    ContractionRow row{T, false, 0, 0.0, {}};
    try {
      const WindowResult wr = fixed_point_solve(init, pc, cfg.params);
      row.converged = wr.report.converged;
      row.iterations = wr.report.iteration_count;
      row.q_hat = wr.report.q_hat;
      row.failure = wr.report.failure;
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    out.rows.push_back(row);
  }
  bool all_conv = true, below_one = true, monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const ContractionRow& r = out.rows[i];
    all_conv = all_conv && r.converged;
    below_one = below_one && r.q_hat < 1.0;
    if (i > 0 && r.converged && out.rows[i - 1].converged && r.q_hat > out.rows[i - 1].q_hat)
      monotone = false;
    detail += (i ? ", " : "") + std::string("T=") + fmt_double(r.window_T) + " q=" +
              fmt_double(r.q_hat);
  }
  out.result.add("all windows converged", all_conv, "");
  out.result.add("contraction estimate below 1", below_one, detail);
  out.result.add("contraction estimate non-increasing as T shrinks", monotone, "");
  return out;
}

void write_contraction_csv(std::ostream& os, const std::vector<ContractionRow>& rows) {
  os << "window_T,converged,iterations,q_hat,failure\n";
  os.precision(10);
  for (const ContractionRow& r : rows)
    os << r.window_T << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.q_hat
       << ",\"" << r.failure << "\"\n";
}

}  // namespace qins
