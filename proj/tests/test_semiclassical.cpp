#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "trilevel/quantum.hpp"
#include "trilevel/semiclassical.hpp"

using namespace trilevel;
using semiclassical::CouplingRange;
using semiclassical::CouplingSegment;
using semiclassical::MinimizeOptions;
using semiclassical::Phase;
using semiclassical::TransitionOrder;
using semiclassical::VariationalPoint;

namespace {

ModelParams resonant_xi(double mu12, double mu23) {
  ModelParams params;
  params.mu12 = mu12;
  params.mu23 = mu23;
  return params;
}

ModelParams unit_circle_v(double mu12, double mu13) {
  ModelParams params;
  params.config = Configuration::V;
  params.omega3 = 1.0;
  params.mu12 = mu12;
  params.mu13 = mu13;
  return params;
}

/// Exhaustive reference minimum of the reduced two-variable surface on a
/// compactified grid; good to a few times the grid resolution.
double grid_minimum(const ModelParams& params, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x2 = static_cast<double>(i) / n;
    const double r2 = std::sqrt(x2 / (1.0 - x2));
    for (int j = 0; j < n; ++j) {
      const double x3 = static_cast<double>(j) / n;
      const double r3 = std::sqrt(x3 / (1.0 - x3));
      best = std::min(best,
                      semiclassical::detail::reduced_energy(r2, r3, params)
                          .energy);
    }
  }
  return best;
}

/// 1-D reference for the rho2 = 0 line: bracket on a fine grid, then shrink
/// by ternary search.
double line_minimum_rho3(const ModelParams& params) {
  const auto f = [&](double r3) {
    return semiclassical::detail::reduced_energy(0.0, r3, params).energy;
  };
  const int n = 2000;
  const double r_max = 6.0;
  int best_i = 0;
  double best = f(0.0);
  for (int i = 1; i <= n; ++i) {
    const double value = f(r_max * i / n);
    if (value < best) {
      best = value;
      best_i = i;
    }
  }
  double lo = r_max * std::max(0, best_i - 1) / n;
  double hi = r_max * std::min(n, best_i + 1) / n;
  for (int iter = 0; iter < 200; ++iter) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (f(a) < f(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_SUITE_BEGIN("semiclassical");

TEST_CASE("energy surface evaluates the closed formula") {
  ModelParams xi = resonant_xi(1.0, 0.0);
  CHECK(semiclassical::energy_surface({0.0, 0.0, 0.0}, xi) == 0.0);
  CHECK(semiclassical::energy_surface({1.0, 0.0, 1.0}, xi) ==
        doctest::Approx(0.5).epsilon(1e-15));

  ModelParams v;
  v.config = Configuration::V;
  v.mu13 = 2.0;
  CHECK(semiclassical::energy_surface({1.0, 1.0, 0.0}, v) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("origin energy equals the lowest level exactly") {
  ModelParams params;
  params.omega1 = 0.37;
  params.omega2 = 1.21;
  params.omega3 = 2.84;
  params.mu12 = 1.9;
  params.mu23 = 0.8;
  CHECK(semiclassical::energy_surface({0.0, 0.0, 0.0}, params) ==
        params.omega1);
}

TEST_CASE("non-finite coordinates are rejected") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ModelParams params = resonant_xi(1.0, 0.5);
  CHECK_THROWS_AS(semiclassical::energy_surface({nan, 0.0, 0.0}, params),
                  NonFiniteInput);
  ModelParams bad = params;
  bad.mu12 = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(semiclassical::minimize(bad), NonFiniteInput);
}

TEST_CASE("optimal field amplitude matches stationarity") {
  ModelParams params = resonant_xi(2.0, 0.0);
  CHECK(semiclassical::optimal_field_amplitude(0.0, 0.0, params) == 0.0);
  CHECK(semiclassical::optimal_field_amplitude(0.0, 1.0, params) ==
        doctest::Approx(1.0).epsilon(1e-15));
  ModelParams cascade = resonant_xi(0.0, 3.0);
  CHECK(semiclassical::optimal_field_amplitude(1.0, 1.0, cascade) ==
        doctest::Approx(1.0).epsilon(1e-15));

  // The returned amplitude is the zero of the rho_bar derivative.
  ModelParams generic;
  generic.config = Configuration::Lambda;
  generic.mu13 = 1.4;
  generic.mu23 = 0.6;
  const double rb =
      semiclassical::optimal_field_amplitude(0.8, 1.3, generic);
  const auto grad = semiclassical::energy_gradient({rb, 0.8, 1.3}, generic);
  CHECK(std::abs(grad[0]) < 1e-14);
}

TEST_CASE("analytic gradient agrees with central differences") {
  const double h = 1e-5;
  const std::vector<std::array<double, 3>> points = {
      {0.7, 0.4, 1.1}, {1.3, 0.9, 0.2}, {0.1, 1.7, 1.6}};
  std::vector<ModelParams> cases;
  cases.push_back(resonant_xi(1.3, 0.8));
  {
    ModelParams lambda;
    lambda.config = Configuration::Lambda;
    lambda.omega1 = 0.1;
    lambda.omega2 = 0.9;
    lambda.omega3 = 2.2;
    lambda.mu13 = 1.1;
    lambda.mu23 = 0.7;
    cases.push_back(lambda);
  }
  cases.push_back(unit_circle_v(0.9, 1.2));

  for (const auto& params : cases) {
    for (const auto& p : points) {
      const auto grad =
          semiclassical::energy_gradient({p[0], p[1], p[2]}, params);
      for (int axis = 0; axis < 3; ++axis) {
        auto shifted = p;
        shifted[axis] += h;
        const double up = semiclassical::energy_surface(
            {shifted[0], shifted[1], shifted[2]}, params);
        shifted[axis] -= 2.0 * h;
        const double down = semiclassical::energy_surface(
            {shifted[0], shifted[1], shifted[2]}, params);
        const double fd = (up - down) / (2.0 * h);
        CHECK(grad[axis] ==
              doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("reduced gradient agrees with central differences") {
  ModelParams params = resonant_xi(1.5, 1.2);
  const double h = 1e-5;
  for (const auto& [r2, r3] : std::vector<std::array<double, 2>>{
           {0.5, 0.8}, {1.4, 0.3}, {0.05, 1.9}}) {
    const auto point = semiclassical::detail::reduced_energy(r2, r3, params);
    const double fd2 =
        (semiclassical::detail::reduced_energy(r2 + h, r3, params).energy -
         semiclassical::detail::reduced_energy(r2 - h, r3, params).energy) /
        (2.0 * h);
    const double fd3 =
        (semiclassical::detail::reduced_energy(r2, r3 + h, params).energy -
         semiclassical::detail::reduced_energy(r2, r3 - h, params).energy) /
        (2.0 * h);
    CHECK(point.g2 == doctest::Approx(fd2).epsilon(1e-6));
    CHECK(point.g3 == doctest::Approx(fd3).epsilon(1e-6));
    CHECK(point.rho_bar ==
          semiclassical::optimal_field_amplitude(r2, r3, params));
  }
}

TEST_CASE("weak coupling stays in the normal phase") {
  const auto result = semiclassical::minimize(resonant_xi(0.5, 0.0));
  CHECK(result.phase == Phase::Normal);
  CHECK(result.energy_per_atom == 0.0);
  CHECK(result.point.rho_bar == 0.0);
  CHECK(result.point.rho2 == 0.0);
  CHECK(result.point.rho3 == 0.0);
  CHECK(result.m_per_atom == 0.0);
  CHECK(result.populations == std::array<double, 3>{1.0, 0.0, 0.0});
  CHECK_FALSE(result.degenerate);

  const auto v = semiclassical::minimize(unit_circle_v(0.4, 0.4));
  CHECK(v.phase == Phase::Normal);
  CHECK(v.energy_per_atom == 0.0);
}

TEST_CASE("strong first-leg coupling reproduces the two-level closed form") {
  const auto params = resonant_xi(2.0, 0.0);
  const auto result = semiclassical::minimize(params);
  CHECK(result.phase == Phase::Collective);
  CHECK(std::abs(result.energy_per_atom - (-9.0 / 16.0)) < 1e-10);
  CHECK(std::abs(result.point.rho2) < 1e-8);
  CHECK(result.point.rho3 ==
        doctest::Approx(std::sqrt(0.6)).epsilon(1e-7));
  CHECK(result.point.rho_bar ==
        doctest::Approx(std::sqrt(15.0) / 4.0).epsilon(1e-7));
  CHECK(result.photon_density ==
        doctest::Approx(15.0 / 16.0).epsilon(1e-7));
  CHECK(result.m_per_atom == doctest::Approx(21.0 / 16.0).epsilon(1e-7));
  CHECK(result.populations[0] == doctest::Approx(0.625).epsilon(1e-7));
  CHECK(result.populations[1] == doctest::Approx(0.375).epsilon(1e-7));
  CHECK(std::abs(result.populations[2]) < 1e-10);
  CHECK(result.grad_norm < 1e-9);

  // Against the independent 1-D line search and the closed form.
  const double oracle = line_minimum_rho3(params);
  CHECK(std::abs(oracle - (-9.0 / 16.0)) < 1e-10);
  CHECK(std::abs(result.energy_per_atom - oracle) < 1e-10);
  CHECK(std::abs(oracles::two_level_collective_energy(1.0, 0.0, 2.0) -
                 (-9.0 / 16.0)) < 1e-15);
}

TEST_CASE("minimum never lands above an exhaustive grid") {
  std::vector<ModelParams> cases;
  cases.push_back(resonant_xi(1.4, 1.1));
  cases.push_back(resonant_xi(0.3, 2.2));
  {
    ModelParams lambda;
    lambda.config = Configuration::Lambda;
    lambda.omega1 = 0.2;
    lambda.omega2 = 1.1;
    lambda.omega3 = 2.7;
    lambda.mu13 = 1.2;
    lambda.mu23 = 0.9;
    cases.push_back(lambda);
  }
  cases.push_back(unit_circle_v(0.8, 1.0));
  for (const auto& params : cases) {
    const double reference = grid_minimum(params, 300);
    const auto result = semiclassical::minimize(params);
    CHECK(result.energy_per_atom <= reference + 1e-12);
    CHECK(result.energy_per_atom >= reference - 1e-3);
  }
}

TEST_CASE("energies are even in every coupling") {
  for (const auto flip : {std::array<double, 2>{-1.0, 1.0},
                          std::array<double, 2>{1.0, -1.0},
                          std::array<double, 2>{-1.0, -1.0}}) {
    const auto base = semiclassical::minimize(resonant_xi(1.6, 0.9));
    const auto mirrored =
        semiclassical::minimize(resonant_xi(1.6 * flip[0], 0.9 * flip[1]));
    CHECK(mirrored.energy_per_atom ==
          doctest::Approx(base.energy_per_atom).epsilon(1e-12));
    CHECK(mirrored.point.rho_bar ==
          doctest::Approx(base.point.rho_bar).epsilon(1e-9));
  }
}

TEST_CASE("phase flips exactly at the second-order boundaries") {
  const double delta = 1e-4;

  // Straight segment of the cascade boundary: mu12 = sqrt(gap21) = 1.
  CHECK(semiclassical::minimize(resonant_xi(1.0 - delta, 0.7)).phase ==
        Phase::Normal);
  CHECK(semiclassical::minimize(resonant_xi(1.0 + delta, 0.7)).phase ==
        Phase::Collective);

  // V ellipse through (0.6, 0.8) for unit gaps.
  CHECK(semiclassical::minimize(unit_circle_v(0.6, 0.8 - delta)).phase ==
        Phase::Normal);
  CHECK(semiclassical::minimize(unit_circle_v(0.6, 0.8 + delta)).phase ==
        Phase::Collective);

  // Lambda boundary at mu13 = sqrt(gap31) when mu23 = 0.
  ModelParams lambda;
  lambda.config = Configuration::Lambda;
  lambda.omega2 = 0.5;
  lambda.omega3 = 1.3;
  const double critical = std::sqrt(1.3);
  lambda.mu13 = critical - delta;
  CHECK(semiclassical::minimize(lambda).phase == Phase::Normal);
  lambda.mu13 = critical + delta;
  CHECK(semiclassical::minimize(lambda).phase == Phase::Collective);
}

TEST_CASE("critical coupling by bisection on the phase label") {
  // Just past a second-order boundary the collective well is only
  // (mu - mu_c)^2 deep, so the default tie tolerance would hand wins to the
  // origin until mu - mu_c ~ sqrt(tie_tol).  Tighten it for the bisection.
  semiclassical::MinimizeOptions opts;
  opts.tie_tol = 1e-15;
  double lo = 0.5, hi = 1.5;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (semiclassical::minimize(resonant_xi(mid, 0.0), opts).phase ==
        Phase::Normal) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  CHECK(std::abs(0.5 * (lo + hi) - 1.0) < 1e-6);
}

TEST_CASE("competing minima swap global status across the arc") {
  // On the first-order arc the collective branch crosses energy zero while
  // both minima coexist.
  const double mu23 = 2.0;
  const double mu_star =
      std::sqrt(1.0 - (mu23 - std::sqrt(2.0)) * (mu23 - std::sqrt(2.0)));
  const double step = 0.05;

  const auto outside = semiclassical::minimize(resonant_xi(mu_star + step, mu23));
  CHECK(outside.phase == Phase::Collective);
  CHECK(outside.energy_per_atom < 0.0);

  const auto inside = semiclassical::minimize(resonant_xi(mu_star - step, mu23));
  CHECK(inside.phase == Phase::Normal);
  CHECK(inside.energy_per_atom == 0.0);

  // The collective branch survives as a metastable local minimum inside the
  // normal region, with positive energy.
  MinimizeOptions opts;
  const auto metastable = semiclassical::detail::local_minimum(
      outside.point.rho2, outside.point.rho3,
      resonant_xi(mu_star - step, mu23), opts);
  CHECK(metastable.converged);
  CHECK(metastable.energy > 0.0);
  CHECK(metastable.rho2 + metastable.rho3 > 0.1);
}

TEST_CASE("level occupation tracks the quantum sector at large atom number") {
  const auto params = resonant_xi(2.0, 0.0);
  const auto classical = semiclassical::minimize(params);

  ModelParams finite = params;
  finite.n_atoms = 30;
  quantum::SearchOptions search;
  search.window = 40;
  search.hard_cap = 300;
  const auto exact = quantum::global_ground(finite, search);
  REQUIRE(exact.converged);
  const double n = finite.n_atoms;
  CHECK(std::abs(exact.m_star / n - classical.m_per_atom) < 0.1);
  CHECK(std::abs(exact.energy / n - classical.energy_per_atom) < 0.05);
}

TEST_CASE("distant boundary minimum is still resolved") {
  // With the first leg switched off the cascade reduces to a two-level
  // model on levels 2-3 whose minimum sits at infinite displacement; the
  // minimizer must still reach its energy.
  const auto params = resonant_xi(0.0, 2.5);
  const auto result = semiclassical::minimize(params);
  const double expected = 1.0 - (2.5 * 2.5 - 1.0) * (2.5 * 2.5 - 1.0) /
                                    (4.0 * 2.5 * 2.5);
  CHECK(result.phase == Phase::Collective);
  CHECK(std::abs(result.energy_per_atom - expected) < 1e-5);
  CHECK(std::abs(expected - (-0.1025)) < 1e-15);
}

TEST_CASE("minimizer option guards") {
  MinimizeOptions opts;
  opts.grid_n = 1;
  CHECK_THROWS_AS(semiclassical::minimize(resonant_xi(1.0, 0.0), opts), Error);
  opts = MinimizeOptions{};
  opts.n_starts = 0;
  CHECK_THROWS_AS(semiclassical::minimize(resonant_xi(1.0, 0.0), opts), Error);
}

TEST_CASE("separatrix curves satisfy their closed forms everywhere") {
  CouplingRange range;
  range.min = 0.0;
  range.max = 3.0;
  range.steps = 121;

  ModelParams xi = resonant_xi(0.0, 0.0);
  const auto curve = semiclassical::separatrix(Configuration::Xi, xi, range);
  REQUIRE(curve.segments.size() == 2);
  CHECK(curve.segments[0].order == TransitionOrder::Second);
  CHECK(curve.segments[1].order == TransitionOrder::First);
  for (const auto& segment : curve.segments) {
    for (const auto& [mu_x, mu_y] : segment.points) {
      CHECK(std::abs(semiclassical::separatrix_residual(Configuration::Xi, xi,
                                                        mu_x, mu_y)) <= 1e-12);
    }
  }
  // Straight segment: constant mu12 = 1 up to and including mu23 = sqrt(2).
  for (const auto& [mu_x, mu_y] : curve.segments[0].points) {
    CHECK(mu_x == 1.0);
    CHECK(mu_y <= std::sqrt(2.0));
  }
  CHECK(curve.segments[0].points.back()[1] ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // Arc terminates exactly on the mu23 axis.
  CHECK(curve.segments[1].points.back()[0] == 0.0);
  CHECK(curve.segments[1].points.back()[1] ==
        doctest::Approx(std::sqrt(2.0) + 1.0).epsilon(1e-15));

  // V: one second-order segment on the ellipse.
  ModelParams v = unit_circle_v(0.0, 0.0);
  CouplingRange v_range;
  v_range.min = 0.0;
  v_range.max = 1.0;
  v_range.steps = 6;
  const auto ellipse = semiclassical::separatrix(Configuration::V, v, v_range);
  REQUIRE(ellipse.segments.size() == 1);
  CHECK(ellipse.segments[0].order == TransitionOrder::Second);
  bool saw_example_point = false;
  for (const auto& [mu_x, mu_y] : ellipse.segments[0].points) {
    CHECK(std::abs(semiclassical::separatrix_residual(Configuration::V, v,
                                                      mu_x, mu_y)) <= 1e-12);
    if (mu_x == 0.6) {
      saw_example_point = true;
      CHECK(mu_y == doctest::Approx(0.8).epsilon(1e-15));
    }
  }
  CHECK(saw_example_point);
  CHECK(ellipse.segments[0].points.back()[0] == 1.0);
  CHECK(ellipse.segments[0].points.back()[1] == 0.0);

  // Lambda: straight segment at mu13 = sqrt(1.3) while mu23 <= sqrt(0.5).
  ModelParams lambda;
  lambda.config = Configuration::Lambda;
  lambda.omega2 = 0.5;
  lambda.omega3 = 1.3;
  const auto lam = semiclassical::separatrix(Configuration::Lambda, lambda,
                                             range);
  REQUIRE(lam.segments.size() == 2);
  CHECK(lam.segments[0].order == TransitionOrder::Second);
  CHECK(lam.segments[0].points.front()[0] ==
        doctest::Approx(std::sqrt(1.3)).epsilon(1e-15));
  CHECK(lam.segments[0].points.front()[1] == 0.0);
}

TEST_CASE("boundary value solves the separatrix relation") {
  ModelParams xi = resonant_xi(0.0, 0.0);
  CHECK(semiclassical::separatrix_boundary_value(Configuration::Xi, xi, 1.2) ==
        doctest::Approx(1.0).epsilon(1e-15));
  const double arc =
      semiclassical::separatrix_boundary_value(Configuration::Xi, xi, 2.0);
  CHECK(std::abs(semiclassical::separatrix_residual(Configuration::Xi, xi, arc,
                                                    2.0)) < 1e-15);
  CHECK(std::isnan(semiclassical::separatrix_boundary_value(Configuration::Xi,
                                                            xi, 2.5)));

  ModelParams v = unit_circle_v(0.0, 0.0);
  CHECK(semiclassical::separatrix_boundary_value(Configuration::V, v, 0.6) ==
        doctest::Approx(0.8).epsilon(1e-15));

  // Signed residual: negative inside, positive outside.
  CHECK(semiclassical::separatrix_residual(Configuration::Xi, xi, 0.5, 0.7) <
        0.0);
  CHECK(semiclassical::separatrix_residual(Configuration::Xi, xi, 1.0, 0.7) ==
        0.0);
  CHECK(semiclassical::separatrix_residual(Configuration::Xi, xi, 1.5, 0.7) >
        0.0);
}

TEST_CASE("degenerate gaps are rejected") {
  ModelParams flat;
  flat.omega1 = 0.0;
  flat.omega2 = 0.0;
  flat.omega3 = 2.0;
  CouplingRange range;
  CHECK_THROWS_AS(semiclassical::separatrix(Configuration::Xi, flat, range),
                  DegenerateGap);
  CHECK_THROWS_AS(
      semiclassical::separatrix_boundary_value(Configuration::Xi, flat, 0.5),
      DegenerateGap);
}

TEST_CASE("order classification") {
  ModelParams xi = resonant_xi(0.0, 0.0);

  SUBCASE("straight cascade segment is second order") {
    CouplingSegment crossing{{0.5, 0.0}, {1.5, 0.0}};
    CHECK(semiclassical::classify_order(xi, crossing) ==
          TransitionOrder::Second);
  }

  SUBCASE("cascade arc is first order") {
    CouplingSegment crossing{{0.4, 2.0}, {1.2, 2.0}};
    CHECK(semiclassical::classify_order(xi, crossing) ==
          TransitionOrder::First);
  }

  SUBCASE("radial crossing of the V ellipse is second order") {
    ModelParams v = unit_circle_v(0.0, 0.0);
    CouplingSegment crossing{{0.3, 0.4}, {0.9, 1.2}};
    CHECK(semiclassical::classify_order(v, crossing) ==
          TransitionOrder::Second);
  }

  SUBCASE("segments that stay on one side throw") {
    CouplingSegment inside{{0.1, 0.0}, {0.5, 0.0}};
    CHECK_THROWS_AS(semiclassical::classify_order(xi, inside), NoCrossing);
  }

  SUBCASE("an unreachable jump threshold is reported, not guessed") {
    CouplingSegment crossing{{0.4, 2.0}, {1.2, 2.0}};
    MinimizeOptions opts;
    opts.jump_tol = 1.0;
    CHECK_THROWS_AS(semiclassical::classify_order(xi, crossing, opts),
                    AmbiguousClassification);
  }

  SUBCASE("too few shrink levels are rejected") {
    CouplingSegment crossing{{0.5, 0.0}, {1.5, 0.0}};
    MinimizeOptions opts;
    opts.jump_levels = 3;
    CHECK_THROWS_AS(semiclassical::classify_order(xi, crossing, opts), Error);
  }
}

TEST_SUITE_END();
