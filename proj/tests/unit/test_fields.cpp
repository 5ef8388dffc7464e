#include <doctest.h>

#include "qins/fields.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

using namespace qins;

namespace {

constexpr double kPi = std::numbers::pi;

Grid torus(int n = 16) { return Grid(Mode::Torus, 2 * kPi, 2 * kPi, n, n); }
Grid rect(int n = 16) { return Grid(Mode::NeumannRect, kPi, kPi, n, n); }

double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

}  // namespace

TEST_CASE("grid rejects odd or tiny sizes") {
  CHECK_THROWS_AS(Grid(Mode::Torus, 1.0, 1.0, 5, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Mode::Torus, 1.0, 1.0, 2, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Mode::Torus, -1.0, 1.0, 8, 8), std::invalid_argument);
  CHECK_NOTHROW(Grid(Mode::NeumannRect, 1.0, 2.0, 4, 6));
}

TEST_CASE("round trip transform") {
  std::mt19937_64 rng(1);
  for (const Grid& g : {torus(), rect(), Grid(Mode::NeumannRect, 1.0, 2.0, 8, 12)}) {
    for (Symmetry s : {kScalarSym, vector_sym(0), vector_sym(1), kShearSym}) {
      const ScalarField f = random_smooth(g, s, rng, 4, 0.7);
      const ScalarField back = inverse(g, forward(f), s);
      CHECK(max_diff(f, back) < 1e-13 * std::max(1.0, max_abs(f)));
    }
  }
}

TEST_CASE("constant field has only the zero mode") {
  const Grid g = torus();
  const Spectrum s = forward(ScalarField::constant(g, 1.0));
  CHECK(std::abs(s.at(0, 0) - 1.0) < 1e-14);
  double rest = 0.0;
  for (Eigen::Index i = 1; i < s.c.size(); ++i) rest = std::max(rest, std::abs(s.c[i]));
  CHECK(rest < 1e-14);
}

TEST_CASE("Parseval") {
  std::mt19937_64 rng(2);
  const Grid g = torus();
  const ScalarField f = random_smooth(g, kScalarSym, rng, 5, 0.8);
  const Spectrum s = forward(f);
  double sum = 0.0;
  for (int i = 0; i < s.m1; ++i)
    for (int j = 0; j < s.m2h; ++j) {
      const double w = (j == 0 || 2 * j == g.work_points(1)) ? 1.0 : 2.0;
      sum += w * std::norm(s.at(i, j));
    }
  const double l2 = inner_L2(f, f);
  CHECK(std::abs(sum * g.volume() - l2) < 1e-12 * l2);
}

TEST_CASE("analytic derivatives on the torus") {
  const Grid g = torus();
  const auto c = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  const VectorField gc = grad(c);
  const auto msin = ScalarField::from_function(g, [](double x, double) { return -std::sin(x); });
  CHECK(max_diff(gc[0], msin) < 1e-13);
  CHECK(max_abs(gc[1]) < 1e-13);

  const auto f = ScalarField::from_function(g, [](double x, double y) {
    return std::cos(2 * x) * std::cos(y);
  });
  CHECK(max_diff(laplacian(f), -5.0 * f) < 1e-12);
}

TEST_CASE("div grad equals laplacian") {
  std::mt19937_64 rng(3);
  for (const Grid& g : {torus(), rect()}) {
    const ScalarField f = random_smooth(g, kScalarSym, rng, 5, 0.7);
    CHECK(max_diff(div(grad(f)), laplacian(f)) < 1e-12 * max_abs(laplacian(f)));
  }
}

TEST_CASE("differentiation is exact on single modes") {
  const Grid g = rect();
  const auto f = ScalarField::from_function(g, [](double x, double y) {
    return std::cos(3 * x) * std::cos(2 * y);
  });
  const auto fx = ScalarField::from_function(
      g, [](double x, double y) { return -3 * std::sin(3 * x) * std::cos(2 * y); }, vector_sym(0));
  CHECK(max_diff(partial(f, 0), fx) < 1e-12 * 3);
  CHECK(partial(f, 0).sym() == vector_sym(0));
  const auto fxy = ScalarField::from_function(
      g, [](double x, double y) { return 6 * std::sin(3 * x) * std::sin(2 * y); }, kShearSym);
  CHECK(max_diff(partial(f, 1, 1), fxy) < 1e-11);
}

TEST_CASE("Neumann data vanish on the rectangle") {
  std::mt19937_64 rng(4);
  const Grid g = rect(20);
  const ScalarField f = random_smooth(g, kScalarSym, rng, 6, 0.7);
  const ScalarField fx = partial(f, 0);
  const ScalarField fy = partial(f, 1);
  const VectorField v = random_smooth_vector(g, rng, 6, 0.7);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double y = g.coord(1, k), x = g.coord(0, k);
    worst = std::max({worst, std::abs(evaluate(fx, 0.0, y)), std::abs(evaluate(fx, kPi, y)),
                      std::abs(evaluate(fy, x, 0.0)), std::abs(evaluate(fy, x, kPi)),
                      std::abs(evaluate(v[0], 0.0, y)), std::abs(evaluate(v[1], x, kPi))});
  }
  CHECK(worst < 1e-12 * std::max(norm(f), norm(v)));
}

TEST_CASE("evaluate reproduces collocation values") {
  std::mt19937_64 rng(5);
  for (const Grid& g : {torus(), rect()}) {
    const ScalarField f = random_smooth(g, kScalarSym, rng, 4, 0.7);
    CHECK(std::abs(evaluate(f, g.coord(0, 3), g.coord(1, 5)) - f(3, 5)) < 1e-12);
  }
}

TEST_CASE("norms of cos x") {
  const Grid g = torus();
  const auto c = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  CHECK(std::abs(mean(c)) < 1e-15);
  CHECK(inner_L2(c, c) == doctest::Approx(2 * kPi * kPi).epsilon(1e-13));
  CHECK(norm(c, Space::Hm1) == doctest::Approx(norm(c)).epsilon(1e-13));
  CHECK(norm(c, Space::H1) == doctest::Approx(std::sqrt(2.0) * norm(c)).epsilon(1e-13));
  CHECK_THROWS(norm(ScalarField::constant(g, 1.0), Space::Hm1));
}

TEST_CASE("dealiased product removes the top third") {
  const Grid g = torus(12);
  const auto a = ScalarField::from_function(g, [](double x, double) { return std::cos(3 * x); });
  const auto b = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  const auto exact = ScalarField::from_function(
      g, [](double x, double) { return 0.5 * (std::cos(4 * x) + std::cos(2 * x)); });
  CHECK(max_diff(pointwise_product(a, b), exact) < 1e-14);
  const ScalarField d = product(a, b);
  const auto low = ScalarField::from_function(g, [](double x, double) { return 0.5 * std::cos(2 * x); });
  CHECK(max_diff(d, low) < 1e-14);
}

TEST_CASE("symmetric gradient kills rotations") {
  const Grid g = torus();
  VectorField v(g);
  v[0] = ScalarField::from_function(g, [](double, double y) { return -std::sin(y); });
  v[1] = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  const TensorField d = sym_grad(v);
  CHECK(max_abs(d.xx) < 1e-14);
  CHECK(max_abs(d.yy) < 1e-14);
  CHECK(std::abs(mean(d.xy)) < 1e-14);
}

TEST_CASE("mixed symmetries are rejected") {
  const Grid g = rect();
  const ScalarField a(g, kScalarSym);
  const ScalarField b(g, vector_sym(0));
  CHECK_THROWS_AS(a + b, std::invalid_argument);
  CHECK_THROWS_AS(ScalarField(g, Eigen::ArrayXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("snapshot round trip") {
  std::mt19937_64 rng(6);
  const Grid g = Grid(Mode::NeumannRect, 1.0, 2.0, 8, 10);
  const ScalarField c = random_smooth(g, kScalarSym, rng);
  const VectorField v = random_smooth_vector(g, rng);
  const auto path = std::filesystem::temp_directory_path() / "qins_fields_snapshot.qins";
  write_snapshot(path.string(), c, v);
  const Snapshot s = read_snapshot(path.string());
  CHECK(s.grid.same_as(g));
  CHECK(max_diff(s.c, c) == 0.0);
  CHECK(max_diff(s.v[0], v[0]) == 0.0);
  CHECK(max_diff(s.v[1], v[1]) == 0.0);
  std::filesystem::remove(path);
  CHECK_THROWS(read_snapshot(path.string()));
}
