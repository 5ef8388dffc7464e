#include <doctest.h>

#include "qins/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qins;

TEST_CASE("defaults") {
  const RunConfig c = parse_config_string("");
  CHECK(c.mode == Mode::Torus);
  CHECK(c.l1 == doctest::Approx(2 * std::numbers::pi));
  CHECK(c.n1 == 32);
  CHECK(c.params.alpha == 1.5);
  CHECK(c.params.beta == -0.5);
  CHECK(c.picard.dt == c.dt);
  CHECK(c.picard.guess == InitialGuess::Lift);
  CHECK(c.contraction_windows.size() == 3);
  const RunConfig r = parse_config_string("domain.mode = rect\n");
  CHECK(r.l2 == doctest::Approx(std::numbers::pi));
}

TEST_CASE("parsing") {
  const RunConfig c = parse_config_string(
      "# comment\n"
      "domain.mode = rect   # trailing\n"
      "grid.n1 = 8\n"
      "  grid.n2=12\n"
      "params.beta = 2.0\n"
      "picard.mode = updated\n"
      "picard.guess = lift_then_map\n"
      "time.dt = 0.01\n"
      "picard.window = 0.05\n"
      "spectrum.a0_sweep = 2, 1 ,0.5\n"
      "contraction.windows = 0.04\n"
      "seed = 9\n");
  CHECK(c.mode == Mode::NeumannRect);
  CHECK(c.n1 == 8);
  CHECK(c.n2 == 12);
  CHECK(c.params.beta == 2.0);
  CHECK(c.picard.coefficient_mode == CoefficientMode::UpdatedEachIteration);
  CHECK(c.picard.guess == InitialGuess::LiftThenMap);
  CHECK(c.picard.window_T == 0.05);
  CHECK(c.spectrum_a0_sweep == std::vector<double>{2.0, 1.0, 0.5});
  CHECK(c.seed == 9);
  CHECK(c.grid().points(1) == 12);
}

TEST_CASE("errors name the key") {
  auto fails = [](const std::string& text, const std::string& key) {
    CHECK_THROWS_WITH_AS(parse_config_string(text), doctest::Contains(key.c_str()), ConfigError);
  };
  fails("grid.nx = 8\n", "grid.nx");
  fails("grid.n1 = 8\ngrid.n1 = 16\n", "grid.n1");
  fails("grid.n1 = 7\n", "grid.n1");
  fails("grid.n1 = eight\n", "grid.n1");
  fails("time.dt = -1\n", "time.dt");
  fails("domain.mode = sphere\n", "domain.mode");
  fails("picard.theta = 0.2\n", "picard.theta");
  fails("picard.mode = fast\n", "picard.mode");
  fails("init.kind = file\n", "init.file");
  fails("spectrum.a0_sweep = 1, x\n", "spectrum.a0_sweep");
  fails("time.dt = 0.1\npicard.window = 0.01\n", "picard.window");
  fails("params.beta = 0\n", "beta");
  CHECK_THROWS_AS(parse_config_string("just words\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/qins.cfg"), ConfigError);
}

TEST_CASE("initial states") {
  RunConfig c = parse_config_string("grid.n1 = 8\ngrid.n2 = 8\ninit.kind = equilibrium\ninit.amplitude = 0.2\n");
  MaterialState s = c.initial_state();
  CHECK(max_abs(s.c - ScalarField::constant(c.grid(), 0.2)) == 0.0);
  CHECK(norm(s.v) == 0.0);

  c = parse_config_string("grid.n1 = 8\ngrid.n2 = 8\ninit.kind = cosine\ninit.amplitude = 0.1\n");
  s = c.initial_state();
  CHECK(max_abs(s.c) == doctest::Approx(0.1));
  CHECK(std::abs(mean(s.c)) < 1e-15);

  c = parse_config_string("grid.n1 = 8\ngrid.n2 = 8\ninit.kind = random\ninit.amplitude = 0.3\n");
  const MaterialState a = c.initial_state(), b = c.initial_state();
  CHECK(max_abs(a.c - b.c) == 0.0);
  CHECK(max_abs(a.c) <= 0.3 + 1e-14);
}
