#pragma once

#include "qins/fields.hpp"
#include "qins/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

namespace qins {

/// Frozen fields defining the linearised generator around c0.
struct LinearizedCoefficients {
  Grid grid;
  PhysParams params;
  ScalarField rho0_m4;  // rho_hat(c0)^-4
  ScalarField nu_t;     // nu(c0) / rho_hat(c0)
  ScalarField eta_t;    // eta(c0) / rho_hat(c0)
  ScalarField a0;       // 2 nu_t + eta_t

  static LinearizedCoefficients from_state(const ScalarField& c0, const PhysParams& p);
  static LinearizedCoefficients constant(const Grid& grid, const PhysParams& p, double rho0,
                                         double nu_t, double eta_t);
  /// Constant coefficients with nu_t = eta_t = a0 / 3.
  static LinearizedCoefficients constant_a0(const Grid& grid, const PhysParams& p, double a0,
                                            double rho0 = 1.0);
  /// Throws unless all coefficient fields are strictly positive.
  void validate() const;
};

/// Evolution unknown (c', g, w): plate variable, divergence, solenoidal velocity.
struct BlockState {
  ScalarField c_prime;
  ScalarField g;
  VectorField w;

  static BlockState zeros(const Grid& grid);
  BlockState& operator+=(const BlockState& o);
  BlockState& operator-=(const BlockState& o);
  BlockState& operator*=(double s);
};

BlockState operator+(BlockState a, const BlockState& b);
BlockState operator-(BlockState a, const BlockState& b);
BlockState operator*(double s, BlockState a);

/// Throws when mean(g) or div(w) exceed their tolerances.
void check_block_invariants(const BlockState& u);

std::pair<ScalarField, ScalarField> apply_A1(const ScalarField& c_prime, const ScalarField& g,
                                             const LinearizedCoefficients& k);
VectorField apply_Agamma(const VectorField& w, const LinearizedCoefficients& k);
/// g-row of A2 (its first component is identically zero).
ScalarField apply_A2(const VectorField& w, const LinearizedCoefficients& k);
VectorField apply_B1(const ScalarField& g, const LinearizedCoefficients& k);
ScalarField apply_B2(const ScalarField& g, const LinearizedCoefficients& k);
BlockState apply_generator(const BlockState& u, const LinearizedCoefficients& k,
                           bool check = true);

/// Spatial part of L(c) in primitive variables:
///   r1 = -div S~(c, Dv) + eps/(alpha beta) grad div(rho^-4 grad c'),  r2 = -div v / beta.
struct PrimitivePair {
  VectorField r1;
  ScalarField r2;
};
PrimitivePair apply_spatial_L(const VectorField& v, const ScalarField& c_prime,
                              const LinearizedCoefficients& k);

/// (r2, div_n r1, P_sigma r1).
BlockState to_block(const VectorField& r1, const ScalarField& r2);
/// v = w + grad Delta_N^-1 g.
VectorField reconstruct_velocity(const BlockState& u);

// Spectral analysis --------------------------------------------------------

struct RootPair {
  double k2 = 0.0;
  std::complex<double> plus;
  std::complex<double> minus;
};

/// Roots of lambda^2 + a0 k2 lambda + eps rho0^-4 k2^2 / (alpha beta^2) = 0 for each k2.
std::vector<RootPair> spectrum_constant_coeff(const PhysParams& p, double a0,
                                              const std::vector<double>& modes, double rho0 = 1.0);

/// Orthonormal collocation basis of the resolved (Nyquist-free) scalar space.
Eigen::MatrixXd scalar_basis(const Grid& grid, bool include_mean);
/// |k|^2 of each column of scalar_basis.
std::vector<double> scalar_basis_k2(const Grid& grid, bool include_mean);

inline constexpr int kDenseLimit = 1024;

/// Dense matrix of -A1 on (c', g) in the basis [scalar_basis(true), scalar_basis(false)].
Eigen::MatrixXd dense_minus_A1(const LinearizedCoefficients& k);
Eigen::VectorXcd spectrum_numeric(const LinearizedCoefficients& k);

/// Smallest argument among eigenvalues with Im > rel_floor max|lambda|: the spectral ray
/// closest to the imaginary axis. NaN when no such eigenvalue exists (overdamped).
double ray_angle(const Eigen::VectorXcd& eig, double rel_floor = 1e-9);

struct SpectrumMatch {
  double k2 = 0.0;
  std::complex<double> predicted_plus, predicted_minus;
  std::complex<double> numeric_plus, numeric_minus;  // nearest computed eigenvalues
  double rel_err = 0.0;
  int multiplicity = 0;           // expected, from the basis
  int found_plus = 0;             // computed eigenvalues within match_tol of each root
  int found_minus = 0;
};

/// Pair each predicted root with the nearest computed eigenvalue and count multiplicities.
std::vector<SpectrumMatch> match_spectrum(const Grid& grid, const std::vector<RootPair>& predicted,
                                          const Eigen::VectorXcd& numeric, double match_tol = 1e-7);

struct H12Report {
  double symmetry_err_A = 0.0;
  double symmetry_err_B = 0.0;
  double min_eig_A = 0.0;
  double min_eig_B = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
};

/// H1/H2 hypotheses for A = eps/(alpha beta) Delta_N div(rho0^-4 grad .), B = -Delta_N(a0 .)
/// in the H^-1 inner product.
H12Report check_H1_H2(const LinearizedCoefficients& k);

struct ResolventSample {
  double angle = 0.0;
  double radius = 0.0;
  double scaled_norm = 0.0;  // |lambda| ||(lambda + A1)^-1||_H
  bool flagged = false;      // lambda too close to the spectrum
};

std::vector<ResolventSample> resolvent_probe(const LinearizedCoefficients& k,
                                             const std::vector<double>& angles,
                                             const std::vector<double>& radii);

struct LowerOrderReport {
  double b1_over_h1 = 0.0;   // max ||B1 g||_L2 / ||g||_H1
  double b1_over_h34 = 0.0;  // max ||B1 g||_L2 / ||g||_H^{3/4}
  double b2_over_h12 = 0.0;  // max ||B2 g||_H^-1 / ||g||_H^{1/2}
};

LowerOrderReport lower_order_bounds(const LinearizedCoefficients& k, int samples,
                                    std::uint64_t seed = 7);

struct EquivalenceReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// (||(A+B)u||_H + ||u||_H) / (||w||_H2 + ||g||_H1 + ||c'||_H3) over random smooth u.
EquivalenceReport norm_equivalence(const LinearizedCoefficients& k, int samples,
                                   std::uint64_t seed = 11);

/// sqrt(||c'||_H1^2 + ||g||_H-1^2 + ||w||_L2^2).
double h_norm(const BlockState& u);

/// Fractional Sobolev norm from the spectrum, weights (1 + |k|^2)^s.
double sobolev_norm(const ScalarField& f, double s);

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumMatch>& rows);

}  // namespace qins
