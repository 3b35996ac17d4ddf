#include "doctest.h"

#include <sstream>

#include "fs2d/config.hpp"
#include "fs2d/errors.hpp"

using namespace fs2d;

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.odometry.stride == 5);
  CHECK(cfg.registration().grid.grid_size == 256);
  CHECK(cfg.registration().grid.cell_size == 0.75);
  CHECK(cfg.registration().rotation.bandwidth == 128);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("parse key = value") {
  std::istringstream in(
      "# comment\n"
      "grid_size = 128   # trailing\n"
      "cell_size=0.5\n"
      "\n"
      "bandwidth = 64\n"
      "stride = 3\n"
      "tau = 2.5\n"
      "window = none\n"
      "subcell = true\n"
      "pair_mode = sliding\n"
      "outlier_policy = hold\n"
      "log_magnitude = off\n"
      "rotation_alternatives = 0\n"
      "rotation_oversample = 2\n"
      "despeckle = false\n"
      "seed = 42\n");
  const RunConfig cfg = parse_run_config(in);
  CHECK(cfg.registration().grid.grid_size == 128);
  CHECK(cfg.registration().grid.cell_size == 0.5);
  CHECK(cfg.registration().grid.window == Window::kNone);
  CHECK(cfg.registration().rotation.bandwidth == 64);
  CHECK_FALSE(cfg.registration().rotation.log_magnitude);
  CHECK(cfg.registration().rotation.alternatives == 0);
  CHECK(cfg.registration().rotation.oversample == 2);
  CHECK(cfg.registration().subcell_refine);
  CHECK(cfg.odometry.pair_mode == PairMode::kSliding);
  CHECK(cfg.odometry.outlier_policy == OutlierPolicy::kHoldPreviousMotion);
  CHECK_FALSE(cfg.registration().grid.despeckle);
  CHECK(cfg.seed == 42);
  // Shared fields reach the report echo.
  CHECK(cfg.eval.stride == 3);
  CHECK(cfg.eval.tau == 2.5);
  CHECK(cfg.eval.cell_size == 0.5);
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_run_config(in);
  };
  CHECK_THROWS_WITH_AS(parse("grid_sise = 64\n"), doctest::Contains("unknown field grid_sise"),
                       InputError);
  CHECK_THROWS_WITH_AS(parse("grid_size = big\n"), doctest::Contains("bad value"), InputError);
  CHECK_THROWS_WITH_AS(parse("just words\n"), doctest::Contains("line 1"), InputError);
  CHECK_THROWS_AS(parse("window = gauss\n"), InputError);
  CHECK_THROWS_AS(parse("subcell = maybe\n"), InputError);
  CHECK_THROWS_AS(parse("stride = 0\n"), InputError);
  CHECK_THROWS_AS(parse("jobs = 0\n"), InputError);
  CHECK_THROWS_AS(parse("grid_size = 31\n"), InputError);
  CHECK_THROWS_AS(parse("bandwidth = 0\n"), InputError);
  CHECK_THROWS_AS(parse("rotation_oversample = 0\n"), InputError);
  CHECK_THROWS_AS(parse("tau = -1\n"), InputError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/fs2d.conf"), InputError);
}
