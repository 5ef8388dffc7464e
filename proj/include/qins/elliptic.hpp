#pragma once

#include "qins/fields.hpp"

#include <cstdint>

namespace qins {

/// P0 f = f - mean(f).
ScalarField mean_project(const ScalarField& f);

/// True when |mean(f)| is negligible relative to the size of f.
bool is_mean_zero(const ScalarField& f, double rel_tol = 1e-12);

/// Inverse weak Neumann Laplacian on mean-zero data; zero mode pinned to 0.
/// Throws std::invalid_argument("mean-zero required") otherwise.
ScalarField neumann_laplacian_solve(const ScalarField& f);

/// G(g): Delta G = g, Neumann data zero, mean zero.
ScalarField g_operator(const ScalarField& g);

/// Helmholtz (Leray) projection onto divergence-free fields with n.v = 0.
VectorField helmholtz_project(const VectorField& v);

/// Mean-zero weak divergence.
ScalarField div_n(const VectorField& v);

/// Remove the rigid motions compatible with n.v = 0 (constants on the torus).
VectorField rigid_projection(const VectorField& v);

/// ||v||_H1 / ||Dv||_L2 for a single field; NaN when ||Dv|| < 1e-14.
double korn_ratio(const VectorField& v);

struct KornReport {
  double max_ratio = 0.0;
  int used = 0;
  int skipped = 0;
};

/// Sampled Korn constant over random smooth fields orthogonal to rigid motions.
KornReport korn_check(const Grid& grid, int sample_count, std::uint64_t seed = 1);

}  // namespace qins
