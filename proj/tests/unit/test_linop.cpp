#include <doctest.h>

#include "qins/elliptic.hpp"
#include "qins/linop.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qins;

namespace {

constexpr double kPi = std::numbers::pi;

Grid torus(int n = 12) { return Grid(Mode::Torus, 2 * kPi, 2 * kPi, n, n); }
Grid rect(int n = 12) { return Grid(Mode::NeumannRect, kPi, kPi, n, n); }

PhysParams unit_params() {
  PhysParams p;
  p.alpha = p.beta = p.epsilon = 1.0;
  return p;
}

ScalarField cosx(const Grid& g) {
  return ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
}

VectorField solenoidal(const Grid& g, std::mt19937_64& rng) {
  const ScalarField psi = random_smooth(g, kShearSym, rng, 4, 0.6);
  return VectorField(partial(psi, 1), -partial(psi, 0));
}

BlockState random_block(const Grid& g, std::mt19937_64& rng) {
  return BlockState{random_smooth(g, kScalarSym, rng, 4, 0.6),
                    mean_project(random_smooth(g, kScalarSym, rng, 4, 0.6)), solenoidal(g, rng)};
}

LinearizedCoefficients random_coeff(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField c0 = random_smooth(g, kScalarSym, rng, 3, 0.5);
  c0 *= 0.6 / max_abs(c0);
  return LinearizedCoefficients::from_state(c0, PhysParams{});
}

double block_diff(const BlockState& a, const BlockState& b) {
  return norm(a.c_prime - b.c_prime) + norm(a.g - b.g) + norm(a.w - b.w);
}

}  // namespace

TEST_CASE("A1 kernel and single-mode symbol") {
  const Grid g = torus();
  const PhysParams p = unit_params();
  const double a0 = 0.8;
  const auto k = LinearizedCoefficients::constant_a0(g, p, a0);
  auto [r1, r2] = apply_A1(ScalarField::constant(g, 2.0), ScalarField(g), k);
  CHECK(max_abs(r1) < 1e-14);
  CHECK(max_abs(r2) < 1e-12);

  const auto c2 = ScalarField::from_function(g, [](double x, double) { return std::cos(2 * x); });
  const double k2 = 4.0;
  auto [c_r1, c_r2] = apply_A1(c2, ScalarField(g), k);
  CHECK(max_abs(c_r1) < 1e-14);
  CHECK(max_abs(c_r2 - p.epsilon / (p.alpha * p.beta) * k2 * k2 * c2) < 1e-11);
  auto [g_r1, g_r2] = apply_A1(ScalarField(g), c2, k);
  CHECK(max_abs(g_r1 + (1.0 / p.beta) * c2) < 1e-14);
  CHECK(max_abs(g_r2 - a0 * k2 * c2) < 1e-12);
}

TEST_CASE("A1 linearity") {
  std::mt19937_64 rng(1);
  const Grid g = rect();
  const auto k = random_coeff(g, 2);
  const BlockState u = random_block(g, rng), v = random_block(g, rng);
  auto [a1, a2] = apply_A1(u.c_prime + v.c_prime, u.g + v.g, k);
  auto [b1, b2] = apply_A1(u.c_prime, u.g, k);
  auto [c1, c2] = apply_A1(v.c_prime, v.g, k);
  CHECK(norm(a1 - b1 - c1) < 1e-12 * norm(a1));
  CHECK(norm(a2 - b2 - c2) < 1e-12 * norm(a2));
  CHECK_THROWS(apply_A1(u.c_prime, ScalarField::constant(g, 1.0), k));
}

TEST_CASE("Stokes part") {
  const Grid g = torus();
  const auto k = LinearizedCoefficients::constant_a0(g, unit_params(), 1.2);
  CHECK(norm(apply_Agamma(VectorField(g), k)) == 0.0);
  const VectorField w(ScalarField::from_function(g, [](double, double y) { return std::sin(y); },
                                                 vector_sym(0)),
                      ScalarField(g, vector_sym(1)));
  const double nu0 = 1.2 / 3.0;
  CHECK(norm(apply_Agamma(w, k) - nu0 * w) < 1e-12);

  std::mt19937_64 rng(3);
  for (const Grid& gr : {torus(), rect()}) {
    const auto kr = random_coeff(gr, 4);
    const VectorField w1 = solenoidal(gr, rng), w2 = solenoidal(gr, rng);
    const double a = inner_L2(apply_Agamma(w1, kr), w2);
    const double b = inner_L2(w1, apply_Agamma(w2, kr));
    CHECK(std::abs(a - b) < 1e-11 * std::abs(a));
    CHECK(inner_L2(apply_Agamma(w1, kr), w1) > 0.0);
  }
  CHECK_THROWS(apply_Agamma(random_smooth_vector(g, rng), k));
}

TEST_CASE("A2") {
  std::mt19937_64 rng(5);
  const Grid g = torus();
  const auto k = LinearizedCoefficients::constant_a0(g, unit_params(), 1.0);
  CHECK(norm(apply_A2(VectorField(g), k)) == 0.0);
  const VectorField w = solenoidal(g, rng);
  CHECK(norm(apply_A2(w, k)) < 1e-12 * norm(w, Space::H1));
  const auto kr = random_coeff(g, 6);
  const ScalarField r = apply_A2(w, kr);
  CHECK(norm(r) > 1e-6);
  CHECK(std::abs(mean(r)) < 1e-13);
}

TEST_CASE("B1 and B2") {
  std::mt19937_64 rng(7);
  const Grid g = rect();
  const auto k = LinearizedCoefficients::constant_a0(g, PhysParams{}, 1.0);
  const ScalarField gg = mean_project(random_smooth(g, kScalarSym, rng));
  CHECK(norm(apply_B1(gg, k)) == 0.0);
  CHECK(norm(apply_B2(gg, k)) == 0.0);
  const auto kr = random_coeff(g, 8);
  CHECK(norm(apply_B1(ScalarField(g), kr)) == 0.0);
  CHECK(norm(apply_B2(ScalarField(g), kr)) == 0.0);
  const VectorField b1 = apply_B1(gg, kr);
  CHECK(norm(div(b1)) < 1e-11 * norm(b1, Space::H1));
  CHECK(std::abs(mean(apply_B2(gg, kr))) < 1e-13);

  const LowerOrderReport lo = lower_order_bounds(kr, 50);
  CHECK(std::isfinite(lo.b1_over_h1));
  CHECK(std::isfinite(lo.b1_over_h34));
  CHECK(std::isfinite(lo.b2_over_h12));
  CHECK(lo.b1_over_h1 > 0.0);
  const LowerOrderReport lc = lower_order_bounds(k, 10);
  CHECK(lc.b1_over_h1 == 0.0);
  CHECK(lc.b2_over_h12 == 0.0);
}

TEST_CASE("generator structure") {
  std::mt19937_64 rng(9);
  const Grid g = torus();
  const auto k = LinearizedCoefficients::constant_a0(g, unit_params(), 1.0);
  CHECK(block_diff(apply_generator(BlockState::zeros(g), k), BlockState::zeros(g)) == 0.0);

  const VectorField w = solenoidal(g, rng);
  const BlockState only_w{ScalarField(g), ScalarField(g), w};
  const BlockState r = apply_generator(only_w, k);
  CHECK(norm(r.c_prime) == 0.0);
  CHECK(norm(r.g) < 1e-12 * norm(w, Space::H1));
  CHECK(norm(r.w - apply_Agamma(w, k)) < 1e-14);

  const auto kr = random_coeff(g, 10);
  const BlockState u = random_block(g, rng);
  const BlockState no_w{u.c_prime, u.g, VectorField(g)};
  const BlockState out = apply_generator(no_w, kr);
  auto [r1, r2] = apply_A1(u.c_prime, u.g, kr);
  CHECK(norm(out.c_prime - r1) < 1e-14);
  CHECK(norm(out.g - r2 - apply_B2(u.g, kr)) < 1e-12 * norm(out.g));
  CHECK(norm(out.w + apply_B1(u.g, kr)) < 1e-14);

  BlockState bad = u;
  bad.g += ScalarField::constant(g, 1.0);
  CHECK_THROWS(apply_generator(bad, kr));
}

TEST_CASE("generator norm equivalence") {
  const auto k = random_coeff(torus(), 11);
  const EquivalenceReport eq = norm_equivalence(k, 50);
  CHECK(eq.min_ratio > 0.0);
  CHECK(eq.max_ratio >= eq.min_ratio);
  CHECK(std::isfinite(eq.max_ratio));
}

TEST_CASE("primitive to block") {
  std::mt19937_64 rng(12);
  const Grid g = torus();
  const VectorField w = solenoidal(g, rng);
  const BlockState u{ScalarField(g), ScalarField(g), w};
  CHECK(norm(reconstruct_velocity(u) - w) == 0.0);

  const BlockState ug{ScalarField(g), -1.0 * cosx(g), VectorField(g)};
  const VectorField v = reconstruct_velocity(ug);
  CHECK(max_abs(v[0] + ScalarField::from_function(g, [](double x, double) { return std::sin(x); },
                                                  vector_sym(0))) < 1e-13);
  CHECK(max_abs(div(v) - ug.g) < 1e-13);

  const BlockState ur = random_block(g, rng);
  CHECK(norm(div(reconstruct_velocity(ur)) - ur.g) < 1e-11 * norm(ur.g));

  const VectorField r1 = random_smooth_vector(g, rng);
  const ScalarField r2 = random_smooth(g, kScalarSym, rng);
  const BlockState b = to_block(r1, r2);
  CHECK(norm(b.c_prime - r2) == 0.0);
  CHECK(norm(reconstruct_velocity(b) - r1) < 1e-12 * norm(r1));
}

TEST_CASE("constant-coefficient roots") {
  const PhysParams p = unit_params();
  const auto r = spectrum_constant_coeff(p, 1.0, {1.0});
  const std::complex<double> e = std::polar(1.0, 2 * kPi / 3);
  CHECK(std::abs(r[0].plus - e) < 1e-15);
  CHECK(std::abs(r[0].minus - std::conj(e)) < 1e-15);

  const auto od = spectrum_constant_coeff(p, 3.0, {1.0});
  const double s5 = std::sqrt(5.0);
  const double lo = std::min(od[0].plus.real(), od[0].minus.real());
  const double hi = std::max(od[0].plus.real(), od[0].minus.real());
  CHECK(lo == doctest::Approx((-3 - s5) / 2).epsilon(1e-14));
  CHECK(hi == doctest::Approx((-3 + s5) / 2).epsilon(1e-14));
  CHECK(od[0].plus.imag() == 0.0);

  const auto un = spectrum_constant_coeff(p, 1e-8, {4.0});
  CHECK(std::abs(un[0].plus.imag()) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(std::arg(un[0].plus) == doctest::Approx(kPi / 2).epsilon(1e-7));
  CHECK_THROWS(spectrum_constant_coeff(p, -1.0, {1.0}));
}

TEST_CASE("dense spectrum") {
  const Grid g = Grid(Mode::Torus, 2 * kPi, 2 * kPi, 16, 16);
  const PhysParams p = unit_params();
  const auto k = LinearizedCoefficients::constant_a0(g, p, 1.0);
  const Eigen::VectorXcd eig = spectrum_numeric(k);
  CHECK(eig.size() == 2 * 15 * 15 - 1);
  const std::vector<double> modes{1, 2, 4, 5, 8, 9, 10};
  const auto rows = match_spectrum(g, spectrum_constant_coeff(p, 1.0, modes), eig);
  for (const SpectrumMatch& m : rows) {
    CHECK(m.rel_err < 1e-8);
    CHECK(m.found_plus == m.multiplicity);
  }
  CHECK(rows[0].multiplicity == 4);
  CHECK(rows[1].multiplicity == 4);
  int zeros = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig[i]) < 1e-10) {
      ++zeros;
    } else {
      CHECK(eig[i].real() < 0.0);
    }
  }
  CHECK(zeros == 1);
  CHECK(ray_angle(eig) == doctest::Approx(2 * kPi / 3).epsilon(1e-10));

  std::ostringstream os;
  write_spectrum_csv(os, rows);
  CHECK(os.str().rfind("mode_k2,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,"
                       "predicted_re,predicted_im,abs_err\n",
                       0) == 0);

  const Grid big(Mode::Torus, 1.0, 1.0, 64, 64);
  CHECK_THROWS(spectrum_numeric(LinearizedCoefficients::constant_a0(big, p, 1.0)));
}

TEST_CASE("rectangle spectrum") {
  const Grid g = Grid(Mode::NeumannRect, kPi, kPi, 10, 10);
  const PhysParams p = unit_params();
  const auto k = LinearizedCoefficients::constant_a0(g, p, 0.5);
  const auto rows =
      match_spectrum(g, spectrum_constant_coeff(p, 0.5, {1, 2, 4, 5}), spectrum_numeric(k));
  for (const SpectrumMatch& m : rows) CHECK(m.rel_err < 1e-8);
  CHECK(rows[0].multiplicity == 2);
  CHECK(rows[1].multiplicity == 1);
}

TEST_CASE("H1 and H2") {
  PhysParams p = unit_params();
  const auto k = LinearizedCoefficients::constant_a0(torus(8), p, 2.0);
  const H12Report r = check_H1_H2(k);
  CHECK(r.symmetry_err_A < 1e-10);
  CHECK(r.symmetry_err_B < 1e-10);
  CHECK(r.min_eig_A > 0.0);
  CHECK(r.min_eig_B > 0.0);
  CHECK(r.rho1 == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.rho2 == doctest::Approx(2.0).epsilon(1e-8));

  for (std::uint64_t seed : {21, 22}) {
    const H12Report v = check_H1_H2(random_coeff(rect(8), seed));
    CHECK(v.symmetry_err_A < 1e-10);
    CHECK(v.symmetry_err_B < 1e-10);
    CHECK(v.rho1 > 0.0);
    CHECK(v.rho1 <= v.rho2);
    CHECK(std::isfinite(v.rho2));
  }

  const H12Report neg = check_H1_H2(LinearizedCoefficients::constant_a0(torus(8), p, -1.0));
  CHECK(neg.min_eig_B < 0.0);
}

TEST_CASE("resolvent") {
  const auto k = LinearizedCoefficients::constant_a0(torus(8), unit_params(), 1.0);
  const std::vector<double> radii{1e-1, 1e0, 1e1, 1e2, 1e3};
  const auto real_axis = resolvent_probe(k, {0.0}, radii);
  double sup = 0.0;
  for (const ResolventSample& s : real_axis) {
    CHECK_FALSE(s.flagged);
    sup = std::max(sup, s.scaled_norm);
  }
  CHECK(sup < 10.0);
  const auto far = resolvent_probe(k, {0.0}, {1e7});
  CHECK(far[0].scaled_norm == doctest::Approx(1.0).epsilon(1e-3));

  const auto near_ray = resolvent_probe(k, {2 * kPi / 3 - 1e-3}, {1.0});
  CHECK(near_ray[0].scaled_norm > 100.0);
  const auto on_eig = resolvent_probe(k, {2 * kPi / 3}, {1.0});
  CHECK(on_eig[0].flagged);
}

TEST_CASE("norms") {
  const Grid g = torus();
  const ScalarField c = cosx(g);
  CHECK(sobolev_norm(c, 0.0) == doctest::Approx(norm(c)).epsilon(1e-13));
  CHECK(sobolev_norm(c, 1.0) == doctest::Approx(norm(c, Space::H1)).epsilon(1e-13));
  CHECK(sobolev_norm(c, 0.75) == doctest::Approx(std::pow(2.0, 0.375) * norm(c)).epsilon(1e-13));
  const BlockState u{c, c, VectorField(g)};
  CHECK(h_norm(u) == doctest::Approx(std::sqrt(2.0 * inner_L2(c, c) + inner_L2(c, c))).epsilon(1e-13));
}
