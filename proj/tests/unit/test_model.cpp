#include <doctest.h>

#include "qins/elliptic.hpp"
#include "qins/model.hpp"

#include <cmath>
#include <numbers>

using namespace qins;

namespace {

constexpr double kPi = std::numbers::pi;

Grid torus(int n = 16) { return Grid(Mode::Torus, 2 * kPi, 2 * kPi, n, n); }

}  // namespace

TEST_CASE("parameter validation") {
  PhysParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("beta != 0"), std::invalid_argument);
  p.beta = 1.6;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(p.validate_linear());
  p = PhysParams{};
  p.closures.nu1 = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PhysParams{};
  p.eps0 = 0.6;  // |beta| (1 + 1.25 eps0) = 0.875 < 1.5 still fine
  CHECK_NOTHROW(p.validate());
  p.beta = -1.3;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("densities") {
  const PhysParams p = PhysParams::from_densities(1.0, 0.5);
  CHECK(p.alpha == doctest::Approx(1.5));
  CHECK(p.beta == doctest::Approx(-0.5));
  CHECK(rho_hat(1.0, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rho_hat(-1.0, p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rho_hat(0.0, p) == doctest::Approx(1.0 / p.alpha).epsilon(1e-15));
  const double far = rho_hat(10.0, p);
  CHECK(far > 0.0);
  CHECK(far == doctest::Approx(1.0 / (p.alpha + p.beta * smooth_clamp(10.0, p.eps0))));
  CHECK(smooth_clamp(10.0, p.eps0) == doctest::Approx(1.0 + 1.25 * p.eps0));
  CHECK(smooth_clamp(-10.0, p.eps0) == doctest::Approx(-1.0 - 1.25 * p.eps0));
  CHECK(smooth_clamp(0.7, p.eps0) == 0.7);
}

TEST_CASE("density derivatives") {
  const PhysParams p;
  CHECK(drho_dc(0.0, p) == doctest::Approx(-p.beta / (p.alpha * p.alpha)).epsilon(1e-14));
  std::mt19937_64 rng(1);
  const Grid g = torus();
  ScalarField c = random_smooth(g, kScalarSym, rng);
  c *= 1.0 / max_abs(c);
  const DerivativeIdentityReport r = rho_c_derivative_identity_check(c, p);
  CHECK(r.drho_residual < 1e-8);
  CHECK(r.drhoc_residual < 1e-8);
}

TEST_CASE("clamp is C3 across the blend points") {
  const double eps0 = 0.1;
  auto f = [&](double x) { return smooth_clamp(x, eps0); };
  // Gap between one-sided third differences must shrink like h.
  auto jump = [&](double x, double h) {
    const double right = (f(x + 3 * h) - 3 * f(x + 2 * h) + 3 * f(x + h) - f(x)) / (h * h * h);
    const double left = (f(x) - 3 * f(x - h) + 3 * f(x - 2 * h) - f(x - 3 * h)) / (h * h * h);
    return std::abs(right - left);
  };
  for (double x : {1.0 + eps0, 1.0 + 1.5 * eps0, -1.0 - eps0, -1.0 - 1.5 * eps0}) {
    const double j1 = jump(x, 1e-3), j2 = jump(x, 5e-4), j3 = jump(x, 2.5e-4);
    CHECK(j1 / j2 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(j2 / j3 == doctest::Approx(2.0).epsilon(0.1));
  }
  // First and second derivatives match exactly at the band edge.
  CHECK(smooth_clamp_derivative(1.0 + eps0, eps0) == 1.0);
  CHECK(smooth_clamp_derivative(1.0 + 1.5 * eps0, eps0) == 0.0);
  const PhysParams p;
  for (int k = 0; k <= 400; ++k) CHECK(rho_hat(-20.0 + 0.1 * k, p) > 0.0);
}

TEST_CASE("stress") {
  const Grid g = torus();
  const PhysParams p;
  const ScalarField c = ScalarField::constant(g, 0.0);
  const TensorField z = stress(c, VectorField(g), p, false);
  CHECK(norm(z) == 0.0);

  VectorField rot(g);
  rot[0] = ScalarField::from_function(g, [](double, double y) { return -std::sin(y); });
  rot[1] = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  const TensorField sr = stress(c, rot, p, false);
  CHECK(max_abs(sr.xx) < 1e-14);
  CHECK(max_abs(sr.yy) < 1e-14);

  const double nu0 = 0.7, eta0 = 0.3;
  const VectorField v(ScalarField::from_function(g, [](double x, double) { return std::sin(x); }),
                      ScalarField(g));
  const TensorField s =
      stress(ScalarField::constant(g, nu0), ScalarField::constant(g, eta0), v);
  const auto cosx = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  CHECK(max_abs(s.xx - (2 * nu0 + eta0) * cosx) < 1e-13);
  CHECK(max_abs(s.xy) < 1e-14);
  CHECK(max_abs(s.yy - eta0 * cosx) < 1e-13);

  std::mt19937_64 rng(2);
  const ScalarField cr = 0.5 * random_smooth(g, kScalarSym, rng);
  const VectorField v1 = random_smooth_vector(g, rng), v2 = random_smooth_vector(g, rng);
  for (bool scaled : {false, true}) {
    const TensorField a = stress(cr, v1 + v2, p, scaled);
    const TensorField b = stress(cr, v1, p, scaled);
    const TensorField d = stress(cr, v2, p, scaled);
    const TensorField diff(a.xx - b.xx - d.xx, a.xy - b.xy - d.xy, a.yy - b.yy - d.yy);
    CHECK(norm(diff) < 1e-12 * norm(a));
  }
}

TEST_CASE("chemical potential") {
  const Grid g = torus();
  PhysParams p;
  std::mt19937_64 rng(3);
  const ScalarField psi = random_smooth(g, kShearSym, rng);
  const VectorField sol(partial(psi, 1), -partial(psi, 0));
  CHECK(max_abs(chem_potential_mu0(sol, p)) < 1e-13);

  p.beta = 2.0;
  p.alpha = 3.0;
  const auto cosx = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  const ScalarField mu = chem_potential_mu0(grad(cosx), p);
  CHECK(max_abs(mu - 0.5 * cosx) < 1e-13);

  for (int k = 0; k < 5; ++k) {
    const VectorField v = random_smooth_vector(g, rng);
    const ScalarField m = chem_potential_mu0(v, p);
    CHECK(std::abs(mean(m)) < 1e-13);
    CHECK(norm(div(v) - p.beta * laplacian(m)) < 1e-11 * norm(div(v)));
  }
}

TEST_CASE("pressure recovery") {
  const Grid g = torus();
  const PhysParams p;
  const MaterialState eq{VectorField(g), ScalarField::constant(g, 0.3)};
  const PressureResult r0 = pressure_recover(eq, p);
  CHECK(r0.residual < 1e-12);
  CHECK(max_abs(r0.g0) < 1e-14);
  const double rho = rho_hat(0.3, p);
  CHECK(r0.pbar == doctest::Approx(phi(0.3) / (rho * rho)).epsilon(1e-13));

  std::mt19937_64 rng(4);
  const MaterialState s{random_smooth_vector(g, rng), 0.5 * random_smooth(g, kScalarSym, rng)};
  const PressureResult r = pressure_recover(s, p);
  CHECK(r.residual < 1e-11);
  CHECK(std::abs(mean(r.g0)) < 1e-13);
}

TEST_CASE("energies") {
  const Grid g = torus(32);
  const PhysParams p;
  CHECK(free_energy(ScalarField::constant(g, 1.0), p) == 0.0);

  const double a = 0.05;
  const auto c = ScalarField::from_function(g, [&](double x, double) { return a * std::cos(x); });
  // Midpoint quadrature of Phi and the analytic gradient energy eps/2 * a^2 * 2 pi^2.
  double bulk = 0.0;
  for (int i = 0; i < 32; ++i) bulk += Phi(a * std::cos(g.coord(0, i)));
  bulk *= 32 * g.cell_area();
  CHECK(free_energy(c, p) ==
        doctest::Approx(bulk + 0.5 * p.epsilon * a * a * 2 * kPi * kPi).epsilon(1e-13));

  std::mt19937_64 rng(5);
  const VectorField v = random_smooth_vector(g, rng);
  const MaterialState s1{v, c}, s2{2.0 * v, c};
  CHECK(kinetic_energy(s2, p) == doctest::Approx(4 * kinetic_energy(s1, p)).epsilon(1e-14));
  CHECK(total_energy(s1, p) == doctest::Approx(kinetic_energy(s1, p) + free_energy(c, p)));
}
