#include "qins/elliptic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qins {

ScalarField mean_project(const ScalarField& f) {
  ScalarField out = f;
  out.values() -= mean(f);
  return out;
}

bool is_mean_zero(const ScalarField& f, double rel_tol) {
  const double scale = std::sqrt(f.values().square().mean());
  return std::abs(mean(f)) <= rel_tol * scale + std::numeric_limits<double>::min();
}

ScalarField neumann_laplacian_solve(const ScalarField& f) {
  if (!is_mean_zero(f)) throw std::invalid_argument("mean-zero required");
  return apply_symbol(f, f.sym(), [](double k1, double k2) {
    const double k2sum = k1 * k1 + k2 * k2;
    return k2sum == 0.0 ? 0.0 : -1.0 / k2sum;
  });
}

ScalarField g_operator(const ScalarField& g) { return neumann_laplacian_solve(g); }

VectorField helmholtz_project(const VectorField& v) {
  return v - grad(neumann_laplacian_solve(div_n(v)));
}

ScalarField div_n(const VectorField& v) { return mean_project(div(v)); }

VectorField rigid_projection(const VectorField& v) {
  // On the rectangle a rotation has non-zero normal velocity on the walls,
  // so no rigid motion survives n.v = 0.
  if (v.grid().mode() == Mode::NeumannRect) return v;
  VectorField out = v;
  out[0].values() -= mean(v[0]);
  out[1].values() -= mean(v[1]);
  return out;
}

double korn_ratio(const VectorField& v) {
  const double dv = norm(sym_grad(v));
  if (dv < 1e-14) return std::numeric_limits<double>::quiet_NaN();
  return norm(v, Space::H1) / dv;
}

KornReport korn_check(const Grid& grid, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be positive");
  std::mt19937_64 rng(seed);
  KornReport r;
  for (int s = 0; s < sample_count; ++s) {
    VectorField v = rigid_projection(random_smooth_vector(grid, rng, 6, 0.7));
    const double q = korn_ratio(v);
    if (std::isnan(q)) {
      ++r.skipped;
      continue;
    }
    ++r.used;
    r.max_ratio = std::max(r.max_ratio, q);
  }
  return r;
}

}  // namespace qins
