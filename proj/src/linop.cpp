#include "qins/linop.hpp"

#include "qins/elliptic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qins {

namespace {

ScalarField mul(const ScalarField& a, const ScalarField& b) { return pointwise_product(a, b); }

VectorField mul(const ScalarField& a, const VectorField& v) {
  return VectorField(mul(a, v[0]), mul(a, v[1]));
}

double plate_coeff(const PhysParams& p) { return p.epsilon / (p.alpha * p.beta); }

void require_mean_zero(const ScalarField& g) {
  if (!is_mean_zero(g, 1e-10)) throw std::invalid_argument("g must be mean-zero");
}

void require_solenoidal(const VectorField& w) {
  const double scale = norm(w, Space::H1);
  if (norm(div(w)) > 1e-10 * scale + 1e-300) throw std::invalid_argument("w must be divergence-free");
}

std::pair<ScalarField, ScalarField> a1_raw(const ScalarField& c_prime, const ScalarField& g,
                                           const LinearizedCoefficients& k) {
  const PhysParams& p = k.params;
  ScalarField r1 = (-1.0 / p.beta) * mean_project(g);
  ScalarField r2 = plate_coeff(p) * laplacian(div(mul(k.rho0_m4, grad(c_prime)))) -
                   laplacian(mul(k.a0, g));
  return {std::move(r1), std::move(r2)};
}

VectorField agamma_raw(const VectorField& w, const LinearizedCoefficients& k) {
  const TensorField d = sym_grad(w);
  const ScalarField two_nu = 2.0 * k.nu_t;
  const TensorField s(mul(two_nu, d.xx), mul(two_nu, d.xy), mul(two_nu, d.yy));
  return -helmholtz_project(div(s));
}

ScalarField a2_raw(const VectorField& w, const LinearizedCoefficients& k) {
  return -div_n(div(stress(k.nu_t, k.eta_t, w)));
}

VectorField b1_raw(const ScalarField& g, const LinearizedCoefficients& k) {
  const VectorField gn = grad(k.nu_t);
  const VectorField gG = grad(g_operator(mean_project(g)));
  VectorField r(g.grid());
  for (int i = 0; i < 2; ++i) {
    r[i] = partial(2.0 * mul(gn[i], gG[0]), 0) + partial(2.0 * mul(gn[i], gG[1]), 1);
  }
  return -helmholtz_project(r);
}

ScalarField b2_raw(const ScalarField& g, const LinearizedCoefficients& k) {
  const VectorField gn = grad(k.nu_t);
  const ScalarField g0 = mean_project(g);
  const ScalarField G = g_operator(g0);
  const ScalarField gxx = partial(G, 2, 0), gxy = partial(G, 1, 1), gyy = partial(G, 0, 2);
  VectorField q(g.grid());
  q[0] = 2.0 * (mul(gn[0], gxx) + mul(gn[1], gxy)) - 2.0 * mul(gn[0], g0);
  q[1] = 2.0 * (mul(gn[0], gxy) + mul(gn[1], gyy)) - 2.0 * mul(gn[1], g0);
  return -div_n(q);
}

ScalarField field_from(const Grid& grid, const Eigen::VectorXd& col) {
  return ScalarField(grid, col.array());
}

Eigen::VectorXd coords(const Eigen::MatrixXd& q, const ScalarField& f) {
  return q.transpose() * f.values().matrix();
}

void require_dense(const Grid& grid) {
  if (grid.size() > kDenseLimit)
    throw std::invalid_argument("dense assembly limited to N1*N2 <= 1024 (got " +
                                std::to_string(grid.size()) + ")");
}

struct BasisMode {
  int m1, m2;
  bool sine;
};

std::vector<BasisMode> basis_modes(const Grid& grid, bool include_mean) {
  std::vector<BasisMode> modes;
  const int n1 = grid.points(0), n2 = grid.points(1);
  if (grid.mode() == Mode::Torus) {
    if (include_mean) modes.push_back({0, 0, false});
    for (int m1 = -(n1 / 2 - 1); m1 <= n1 / 2 - 1; ++m1) {
      for (int m2 = 0; m2 <= n2 / 2 - 1; ++m2) {
        if (m2 == 0 && m1 <= 0) continue;
        modes.push_back({m1, m2, false});
        modes.push_back({m1, m2, true});
      }
    }
  } else {
    for (int m1 = 0; m1 < n1; ++m1) {
      for (int m2 = 0; m2 < n2; ++m2) {
        if (m1 == 0 && m2 == 0 && !include_mean) continue;
        modes.push_back({m1, m2, false});
      }
    }
  }
  return modes;
}

double mode_k2(const Grid& grid, const BasisMode& m) {
  const double f = grid.mode() == Mode::Torus ? 2.0 : 1.0;
  const double k1 = f * std::numbers::pi * m.m1 / grid.length(0);
  const double k2 = f * std::numbers::pi * m.m2 / grid.length(1);
  return k1 * k1 + k2 * k2;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a, double& min_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  min_eig = es.eigenvalues().minCoeff();
  const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

// L^T X L^-T for a Cholesky factor L of the Gram matrix.
Eigen::MatrixXd gram_similarity(const Eigen::MatrixXd& l, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd lx = l.transpose() * x;
  return l.triangularView<Eigen::Lower>().solve(lx.transpose()).transpose();
}

Eigen::MatrixXd hm1_gram(const Grid& grid, const Eigen::MatrixXd& q0) {
  Eigen::MatrixXd m(q0.cols(), q0.cols());
  for (Eigen::Index j = 0; j < q0.cols(); ++j) {
    const ScalarField s = -neumann_laplacian_solve(field_from(grid, q0.col(j)));
    m.col(j) = coords(q0, s) * grid.cell_area();
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

// Coefficients --------------------------------------------------------------

LinearizedCoefficients LinearizedCoefficients::from_state(const ScalarField& c0,
                                                          const PhysParams& p) {
  p.validate_linear();
  const ScalarField rho = rho_hat(c0, p);
  const Grid& g = c0.grid();
  ScalarField r4(g, rho.values().pow(-4.0));
  ScalarField nt(g, nu(c0, p).values() / rho.values());
  ScalarField et(g, eta(c0, p).values() / rho.values());
  ScalarField a = 2.0 * nt + et;
  return LinearizedCoefficients{g, p, std::move(r4), std::move(nt), std::move(et), std::move(a)};
}

LinearizedCoefficients LinearizedCoefficients::constant(const Grid& grid, const PhysParams& p,
                                                        double rho0, double nu_t, double eta_t) {
  p.validate_linear();
  return LinearizedCoefficients{grid,
                                p,
                                ScalarField::constant(grid, std::pow(rho0, -4.0)),
                                ScalarField::constant(grid, nu_t),
                                ScalarField::constant(grid, eta_t),
                                ScalarField::constant(grid, 2.0 * nu_t + eta_t)};
}

LinearizedCoefficients LinearizedCoefficients::constant_a0(const Grid& grid, const PhysParams& p,
                                                           double a0, double rho0) {
  return constant(grid, p, rho0, a0 / 3.0, a0 / 3.0);
}

void LinearizedCoefficients::validate() const {
  auto pos = [](const ScalarField& f, const char* name) {
    if (!(f.values().minCoeff() > 0.0))
      throw std::invalid_argument(std::string("coefficient ") + name + " must be strictly positive");
  };
  pos(rho0_m4, "rho0^-4");
  pos(nu_t, "nu_t");
  pos(eta_t, "eta_t");
  pos(a0, "a0");
}

// BlockState ----------------------------------------------------------------

BlockState BlockState::zeros(const Grid& grid) {
  return BlockState{ScalarField(grid), ScalarField(grid), VectorField(grid)};
}

BlockState& BlockState::operator+=(const BlockState& o) {
  c_prime += o.c_prime;
  g += o.g;
  w += o.w;
  return *this;
}

BlockState& BlockState::operator-=(const BlockState& o) {
  c_prime -= o.c_prime;
  g -= o.g;
  w -= o.w;
  return *this;
}

BlockState& BlockState::operator*=(double s) {
  c_prime *= s;
  g *= s;
  w *= s;
  return *this;
}

BlockState operator+(BlockState a, const BlockState& b) { return a += b; }
BlockState operator-(BlockState a, const BlockState& b) { return a -= b; }
BlockState operator*(double s, BlockState a) { return a *= s; }

void check_block_invariants(const BlockState& u) {
  if (!is_mean_zero(u.g, 1e-12)) throw std::invalid_argument("BlockState: mean(g) != 0");
  const double scale = norm(u.w, Space::H1) + norm(u.g);
  if (norm(div(u.w)) > 1e-11 * scale + 1e-300)
    throw std::invalid_argument("BlockState: div(w) != 0");
}

// Operators -----------------------------------------------------------------

std::pair<ScalarField, ScalarField> apply_A1(const ScalarField& c_prime, const ScalarField& g,
                                             const LinearizedCoefficients& k) {
  require_mean_zero(g);
  return a1_raw(c_prime, g, k);
}

VectorField apply_Agamma(const VectorField& w, const LinearizedCoefficients& k) {
  require_solenoidal(w);
  return agamma_raw(w, k);
}

ScalarField apply_A2(const VectorField& w, const LinearizedCoefficients& k) {
  require_solenoidal(w);
  return a2_raw(w, k);
}

VectorField apply_B1(const ScalarField& g, const LinearizedCoefficients& k) {
  require_mean_zero(g);
  return b1_raw(g, k);
}

ScalarField apply_B2(const ScalarField& g, const LinearizedCoefficients& k) {
  require_mean_zero(g);
  return b2_raw(g, k);
}

BlockState apply_generator(const BlockState& u, const LinearizedCoefficients& k, bool check) {
  if (check) check_block_invariants(u);
  auto [r1, r2] = a1_raw(u.c_prime, u.g, k);
  r2 += a2_raw(u.w, k);
  r2 += b2_raw(u.g, k);
  VectorField rw = agamma_raw(u.w, k) - b1_raw(u.g, k);
  return BlockState{std::move(r1), std::move(r2), std::move(rw)};
}

PrimitivePair apply_spatial_L(const VectorField& v, const ScalarField& c_prime,
                              const LinearizedCoefficients& k) {
  const PhysParams& p = k.params;
  VectorField r1 = -div(stress(k.nu_t, k.eta_t, v)) +
                   plate_coeff(p) * grad(div(mul(k.rho0_m4, grad(c_prime))));
  ScalarField r2 = (-1.0 / p.beta) * div(v);
  return PrimitivePair{std::move(r1), std::move(r2)};
}

BlockState to_block(const VectorField& r1, const ScalarField& r2) {
  return BlockState{r2, div_n(r1), helmholtz_project(r1)};
}

VectorField reconstruct_velocity(const BlockState& u) {
  return u.w + grad(neumann_laplacian_solve(u.g));
}

// Spectral analysis ---------------------------------------------------------

std::vector<RootPair> spectrum_constant_coeff(const PhysParams& p, double a0,
                                              const std::vector<double>& modes, double rho0) {
  p.validate_linear();
  if (!(a0 > 0.0)) throw std::invalid_argument("a0 must be positive");
  std::vector<RootPair> out;
  out.reserve(modes.size());
  for (double k2 : modes) {
    const double b = a0 * k2;
    const double c = p.epsilon * std::pow(rho0, -4.0) * k2 * k2 / (p.alpha * p.beta * p.beta);
    const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * c, 0.0));
    RootPair r{k2, 0.5 * (-b + disc), 0.5 * (-b - disc)};
    // Stable form for the smaller real root.
    if (disc.imag() == 0.0 && c != 0.0) r.plus = c / r.minus;
    out.push_back(r);
  }
  return out;
}

Eigen::MatrixXd scalar_basis(const Grid& grid, bool include_mean) {
  const auto modes = basis_modes(grid, include_mean);
  Eigen::MatrixXd q(grid.size(), static_cast<Eigen::Index>(modes.size()));
  const int n1 = grid.points(0), n2 = grid.points(1);
  for (std::size_t c = 0; c < modes.size(); ++c) {
    const BasisMode& m = modes[c];
    Eigen::VectorXd col(grid.size());
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        double v;
        if (grid.mode() == Mode::Torus) {
          const double ph = 2.0 * std::numbers::pi * (double(m.m1) * i / n1 + double(m.m2) * j / n2);
          v = m.sine ? std::sin(ph) : std::cos(ph);
        } else {
          v = std::cos(std::numbers::pi * m.m1 * (i + 0.5) / n1) *
              std::cos(std::numbers::pi * m.m2 * (j + 0.5) / n2);
        }
        col[i * n2 + j] = v;
      }
    }
    q.col(static_cast<Eigen::Index>(c)) = col.normalized();
  }
  return q;
}

std::vector<double> scalar_basis_k2(const Grid& grid, bool include_mean) {
  std::vector<double> out;
  for (const BasisMode& m : basis_modes(grid, include_mean)) out.push_back(mode_k2(grid, m));
  return out;
}

Eigen::MatrixXd dense_minus_A1(const LinearizedCoefficients& k) {
  const Grid& grid = k.grid;
  require_dense(grid);
  const Eigen::MatrixXd qc = scalar_basis(grid, true);
  const Eigen::MatrixXd q0 = scalar_basis(grid, false);
  const Eigen::Index nc = qc.cols(), n0 = q0.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nc + n0, nc + n0);
  const ScalarField zero(grid);
  for (Eigen::Index j = 0; j < nc; ++j) {
    auto [r1, r2] = a1_raw(field_from(grid, qc.col(j)), zero, k);
    m.block(0, j, nc, 1) = -coords(qc, r1);
    m.block(nc, j, n0, 1) = -coords(q0, r2);
  }
  for (Eigen::Index j = 0; j < n0; ++j) {
    auto [r1, r2] = a1_raw(zero, field_from(grid, q0.col(j)), k);
    m.block(0, nc + j, nc, 1) = -coords(qc, r1);
    m.block(nc, nc + j, n0, 1) = -coords(q0, r2);
  }
  return m;
}

Eigen::VectorXcd spectrum_numeric(const LinearizedCoefficients& k) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense_minus_A1(k), false);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolve failed");
  return es.eigenvalues();
}

double ray_angle(const Eigen::VectorXcd& eig, double rel_floor) {
  const double scale = eig.size() ? eig.cwiseAbs().maxCoeff() : 0.0;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig[i].imag() <= rel_floor * scale) continue;
    const double a = std::arg(eig[i]);
    if (std::isnan(best) || a < best) best = a;
  }
  return best;
}

std::vector<SpectrumMatch> match_spectrum(const Grid& grid, const std::vector<RootPair>& predicted,
                                          const Eigen::VectorXcd& numeric, double match_tol) {
  const auto k2s = scalar_basis_k2(grid, false);
  std::vector<SpectrumMatch> out;
  for (const RootPair& r : predicted) {
    SpectrumMatch m;
    m.k2 = r.k2;
    m.predicted_plus = r.plus;
    m.predicted_minus = r.minus;
    for (double k2 : k2s)
      if (std::abs(k2 - r.k2) <= 1e-9 * std::max(1.0, r.k2)) ++m.multiplicity;
    auto nearest = [&](std::complex<double> z, int& found) {
      std::complex<double> best = numeric.size() ? numeric[0] : std::complex<double>();
      for (Eigen::Index i = 0; i < numeric.size(); ++i) {
        if (std::abs(numeric[i] - z) < std::abs(best - z)) best = numeric[i];
        if (std::abs(numeric[i] - z) <= match_tol * std::abs(z)) ++found;
      }
      return best;
    };
    m.numeric_plus = nearest(r.plus, m.found_plus);
    m.numeric_minus = nearest(r.minus, m.found_minus);
    m.rel_err = std::max(std::abs(m.numeric_plus - r.plus) / std::abs(r.plus),
                         std::abs(m.numeric_minus - r.minus) / std::abs(r.minus));
    out.push_back(m);
  }
  return out;
}

H12Report check_H1_H2(const LinearizedCoefficients& k) {
  const Grid& grid = k.grid;
  require_dense(grid);
  const PhysParams& p = k.params;
  // c -> -c relabels the phases and flips the sign of beta; A is built with |beta|.
  const double a_coeff = p.epsilon / (p.alpha * std::abs(p.beta));
  const Eigen::MatrixXd q0 = scalar_basis(grid, false);
  const Eigen::Index n = q0.cols();
  Eigen::MatrixXd a(n, n), b(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const ScalarField q = field_from(grid, q0.col(j));
    a.col(j) = coords(q0, a_coeff * laplacian(div(mul(k.rho0_m4, grad(q)))));
    b.col(j) = coords(q0, -laplacian(mul(k.a0, q)));
  }
  const Eigen::MatrixXd m = hm1_gram(grid, q0);
  H12Report r;
  auto sym_err = [&](const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd s = m * x;
    return (s - s.transpose()).norm() / std::max(s.norm(), 1e-300);
  };
  r.symmetry_err_A = sym_err(a);
  r.symmetry_err_B = sym_err(b);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("H^-1 Gram matrix not positive");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd ah = gram_similarity(l, a);
  Eigen::MatrixXd bh = gram_similarity(l, b);
  ah = 0.5 * (ah + ah.transpose());
  bh = 0.5 * (bh + bh.transpose());
  const Eigen::MatrixXd a_half = spd_sqrt(ah, r.min_eig_A);
  r.min_eig_B = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(bh, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
  if (!(r.min_eig_A > 0.0)) {
    r.rho1 = r.rho2 = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(bh, a_half,
                                                                Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success) throw std::runtime_error("generalized eigensolve failed");
  r.rho1 = ges.eigenvalues().minCoeff();
  r.rho2 = ges.eigenvalues().maxCoeff();
  return r;
}

std::vector<ResolventSample> resolvent_probe(const LinearizedCoefficients& k,
                                             const std::vector<double>& angles,
                                             const std::vector<double>& radii) {
  const Grid& grid = k.grid;
  const Eigen::MatrixXd minus_a1 = dense_minus_A1(k);
  const Eigen::MatrixXd qc = scalar_basis(grid, true);
  const Eigen::MatrixXd q0 = scalar_basis(grid, false);
  const Eigen::Index nc = qc.cols(), n0 = q0.cols(), n = nc + n0;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < nc; ++j) {
    const ScalarField q = field_from(grid, qc.col(j));
    gram.block(0, j, nc, 1) = coords(qc, q - laplacian(q)) * grid.cell_area();
  }
  gram.block(nc, nc, n0, n0) = hm1_gram(grid, q0);
  gram = 0.5 * (gram + gram.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("H Gram matrix not positive");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXcd t_hat = gram_similarity(l, -minus_a1).cast<std::complex<double>>();

  Eigen::EigenSolver<Eigen::MatrixXd> es(minus_a1, false);
  const Eigen::VectorXcd eig = es.eigenvalues();

  std::vector<ResolventSample> out;
  for (double ang : angles) {
    for (double rad : radii) {
      const std::complex<double> lam = std::polar(rad, ang);
      ResolventSample s{ang, rad, std::numeric_limits<double>::quiet_NaN(), false};
      const double dist = (eig.array() - lam).abs().minCoeff();
      if (dist < 1e-8 * std::max(1.0, std::abs(lam))) {
        s.flagged = true;
        out.push_back(s);
        continue;
      }
      Eigen::MatrixXcd shifted = t_hat;
      shifted.diagonal().array() += lam;
      Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted);
      const double smin = svd.singularValues().minCoeff();
      s.scaled_norm = std::abs(lam) / smin;
      out.push_back(s);
    }
  }
  return out;
}

double sobolev_norm(const ScalarField& f, double s) {
  const Spectrum sp = forward(f);
  const Grid& grid = f.grid();
  const int m1 = grid.work_points(0), m2 = grid.work_points(1);
  double acc = 0.0;
  for (int i = 0; i < m1; ++i) {
    const double k1 = grid.wavenumber(0, signed_mode(i, m1));
    for (int j = 0; j < sp.m2h; ++j) {
      const double k2 = grid.wavenumber(1, j);
      const double w = (j == 0 || 2 * j == m2) ? 1.0 : 2.0;
      acc += w * std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(sp.at(i, j));
    }
  }
  return std::sqrt(acc * grid.volume());
}

LowerOrderReport lower_order_bounds(const LinearizedCoefficients& k, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  std::mt19937_64 rng(seed);
  LowerOrderReport r;
  for (int s = 0; s < samples; ++s) {
    const ScalarField g = mean_project(random_smooth(k.grid, kScalarSym, rng, 6, 0.7));
    const double b1 = norm(b1_raw(g, k));
    const ScalarField b2 = b2_raw(g, k);
    r.b1_over_h1 = std::max(r.b1_over_h1, b1 / norm(g, Space::H1));
    r.b1_over_h34 = std::max(r.b1_over_h34, b1 / sobolev_norm(g, 0.75));
    r.b2_over_h12 = std::max(r.b2_over_h12, norm(b2, Space::Hm1) / sobolev_norm(g, 0.5));
  }
  return r;
}

double h_norm(const BlockState& u) {
  const double c = norm(u.c_prime, Space::H1);
  const double g = norm(mean_project(u.g), Space::Hm1);
  const double w = norm(u.w);
  return std::sqrt(c * c + g * g + w * w);
}

EquivalenceReport norm_equivalence(const LinearizedCoefficients& k, int samples,
                                   std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  std::mt19937_64 rng(seed);
  EquivalenceReport r{std::numeric_limits<double>::infinity(), 0.0};
  for (int s = 0; s < samples; ++s) {
    BlockState u{random_smooth(k.grid, kScalarSym, rng, 6, 0.7),
                 mean_project(random_smooth(k.grid, kScalarSym, rng, 6, 0.7)),
                 helmholtz_project(random_smooth_vector(k.grid, rng, 6, 0.7))};
    const double lhs = h_norm(apply_generator(u, k, false)) + h_norm(u);
    const double rhs =
        norm(u.w, Space::H2) + norm(u.g, Space::H1) + norm(u.c_prime, Space::H3);
    const double q = lhs / rhs;
    r.min_ratio = std::min(r.min_ratio, q);
    r.max_ratio = std::max(r.max_ratio, q);
  }
  return r;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumMatch>& rows) {
  os << "mode_k2,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,predicted_re,"
        "predicted_im,abs_err\n";
  os.precision(17);
  for (const SpectrumMatch& m : rows) {
    const double err = std::max(std::abs(m.numeric_plus - m.predicted_plus),
                                std::abs(m.numeric_minus - m.predicted_minus));
    os << m.k2 << ',' << m.numeric_plus.real() << ',' << m.numeric_plus.imag() << ','
       << m.numeric_minus.real() << ',' << m.numeric_minus.imag() << ','
       << m.predicted_plus.real() << ',' << m.predicted_plus.imag() << ',' << err << '\n';
  }
}

}  // namespace qins
