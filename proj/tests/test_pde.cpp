#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lwk/errors.hpp"
#include "lwk/grid.hpp"
#include "lwk/pde.hpp"

using namespace lwk;

namespace {

GridFunction random_field(const GridSpec& s, std::uint64_t seed, double lo = -1.0,
                          double hi = 1.0) {
    GridFunction f = GridFunction::zeros(s);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

} // namespace

TEST_CASE("helmholtz solve of zero rhs is zero") {
    GridSpec s = square_grid(12, 0.0, 1.0);
    GridFunction u = helmholtz_solve(s, GridFunction::zeros(s));
    for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("helmholtz manufactured solution") {
    GridSpec s = square_grid(16, 0.0, 1.0);
    GridFunction star = random_field(s, 8);
    GridFunction rhs = helmholtz_apply(s, star);
    GridFunction u = helmholtz_solve(s, rhs, 1e-13);
    CHECK(max_abs_diff(u, star) < 1e-9);
}

TEST_CASE("helmholtz inverse is self-adjoint") {
    GridSpec s = square_grid(10, -1.0, 1.0);
    GridFunction a = random_field(s, 21);
    GridFunction b = random_field(s, 22);
    const double lhs = inner_product(helmholtz_solve(s, a, 1e-13), b);
    const double rhs = inner_product(a, helmholtz_solve(s, b, 1e-13));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("elliptic stencil is symmetric") {
    GridSpec s = square_grid(9, 0.0, 1.0);
    GridFunction c = random_field(s, 3, 0.0, 2.0);
    GridFunction u = random_field(s, 4);
    GridFunction v = random_field(s, 5);
    const double lhs = inner_product(elliptic_apply_operator(s, c, u), v);
    const double rhs = inner_product(u, elliptic_apply_operator(s, c, v));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("dirichlet problem reproduces linear solutions at nodes") {
    // ghost extrapolation and the 5-point stencil are exact for u = x + y
    GridSpec s = square_grid(24, 0.0, 1.0);
    auto g = [](double x, double y) { return x + y; };
    GridFunction truth = GridFunction::zeros(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            truth.at(i, j) = s.x_center(i) + s.y_center(j);

    SUBCASE("c = 0, f = 0") {
        GridFunction c = GridFunction::zeros(s);
        GridFunction rhs = dirichlet_rhs(s, GridFunction::zeros(s), g);
        GridFunction u = elliptic_solve(s, c, rhs);
        CHECK(max_abs_diff(u, truth) < 1e-8);
    }

    SUBCASE("constant c, matched source") {
        const double gamma = 1.7;
        GridFunction c = GridFunction::constant(s, gamma);
        GridFunction f = truth;
        for (auto& v : f.values) v *= gamma;
        GridFunction u = elliptic_solve(s, c, dirichlet_rhs(s, f, g));
        CHECK(max_abs_diff(u, truth) < 1e-8);
    }
}

TEST_CASE("elliptic solve rejects inadmissible coefficients") {
    GridSpec s = square_grid(8, 0.0, 1.0);
    GridFunction c = GridFunction::constant(s, -1.0);
    CHECK_THROWS_AS(elliptic_solve(s, c, GridFunction::constant(s, 1.0)), SolverError);
}

TEST_CASE("cg reports iteration-cap failure") {
    GridSpec s = square_grid(16, 0.0, 1.0);
    GridFunction c = GridFunction::zeros(s);
    GridFunction rhs = random_field(s, 6);
    CHECK_THROWS_AS(elliptic_solve(s, c, rhs, 1e-12, 1), SolverError);
}

TEST_CASE("pde shape errors") {
    GridSpec s = square_grid(8, 0.0, 1.0);
    GridFunction wrong = GridFunction::zeros(square_grid(9, 0.0, 1.0));
    CHECK_THROWS_AS(helmholtz_solve(s, wrong), ShapeError);
    CHECK_THROWS_AS(elliptic_apply_operator(s, GridFunction::zeros(s), wrong), ShapeError);
    CHECK_THROWS_AS(dirichlet_rhs(s, wrong, [](double, double) { return 0.0; }), ShapeError);
}
