#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lwk/errors.hpp"
#include "lwk/grid.hpp"
#include "lwk/penalty.hpp"

using namespace lwk;

namespace {

GridFunction random_field(const GridSpec& s, std::uint64_t seed, double lo = -3.0,
                          double hi = 3.0) {
    GridFunction f = GridFunction::zeros(s);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

// brute-force pointwise minimizer of (1/(2b))t^2 + |t| - xi*t over a grid
double grid_search_soft(double xi, double beta) {
    const double span = beta * (std::abs(xi) + 1.0) + 1.0;
    double best_t = 0.0, best_f = 0.0;
    for (double t = -span; t <= span; t += 1e-4) {
        const double f = t * t / (2.0 * beta) + std::abs(t) - xi * t;
        if (f < best_f) {
            best_f = f;
            best_t = t;
        }
    }
    return best_t;
}

} // namespace

TEST_CASE("penalty validation") {
    Penalty bad;
    bad.beta = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad.beta = 1.0;
    bad.tv_iters = 0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad.tv_iters = 1;
    bad.tv_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    CHECK(Penalty{}.c0() == doctest::Approx(0.5));
    CHECK(Penalty{PenaltyKind::TVL2, 4.0}.c0() == doctest::Approx(0.125));
    CHECK(Penalty{}.p() == 2.0);
}

TEST_CASE("penalty values on constant fields") {
    GridSpec s = square_grid(10, -1.0, 1.0);

    Penalty l1{PenaltyKind::L1L2, 1.0};
    CHECK(penalty_value(l1, GridFunction::zeros(s)) == 0.0);
    // x = 2 on area 4: (1/2)*16 + 8 = 16
    CHECK(penalty_value(l1, GridFunction::constant(s, 2.0)) == doctest::Approx(16.0).epsilon(1e-13));

    Penalty tv{PenaltyKind::TVL2, 2.5};
    GridFunction c = GridFunction::constant(s, -1.5);
    // TV of a constant vanishes, quadratic part remains
    CHECK(penalty_value(tv, c) ==
          doctest::Approx(inner_product(c, c) / (2.0 * 2.5)).epsilon(1e-13));

    Penalty q{PenaltyKind::Quadratic, 0.5};
    GridFunction f = random_field(s, 3);
    CHECK(penalty_value(q, f) == doctest::Approx(inner_product(f, f)).epsilon(1e-13));
}

TEST_CASE("soft threshold branches") {
    GridSpec s = square_grid(2, 0.0, 1.0);
    GridFunction xi = GridFunction::zeros(s);
    xi.values = {2.0, -3.0, 1.0, 0.5};

    GridFunction a = soft_threshold(xi, 1.0);
    CHECK(a.values[0] == 1.0);
    CHECK(a.values[2] == 0.0);
    CHECK(a.values[3] == 0.0);

    GridFunction b = soft_threshold(xi, 2.0);
    CHECK(b.values[1] == -4.0);

    CHECK_THROWS_AS(soft_threshold(xi, 0.0), ParameterError);
    CHECK_THROWS_AS(soft_threshold(xi, -1.0), ParameterError);
}

TEST_CASE("soft threshold equals the pointwise grid-search minimizer") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> xi_dist(-5.0, 5.0);
    std::uniform_real_distribution<double> beta_dist(0.1, 3.0);
    GridSpec one{1, 1, 0.0, 1.0, 0.0, 1.0};
    for (int trial = 0; trial < 50; ++trial) {
        const double xi = xi_dist(rng);
        const double beta = beta_dist(rng);
        GridFunction f = GridFunction::constant(one, xi);
        const double got = soft_threshold(f, beta).values[0];
        CHECK(std::abs(got - grid_search_soft(xi, beta)) < 2e-4);
    }
}

TEST_CASE("conjugate minimizer closed forms") {
    GridSpec s = square_grid(6, -1.0, 1.0);

    Penalty q{PenaltyKind::Quadratic, 3.0};
    GridFunction xi = GridFunction::constant(s, 2.0);
    CHECK(conjugate_minimizer(q, xi).values[0] == doctest::Approx(6.0));

    Penalty l1{PenaltyKind::L1L2, 1.0};
    CHECK(conjugate_minimizer(l1, xi).values[7] == doctest::Approx(1.0));
    GridFunction half = GridFunction::constant(s, 0.5);
    for (double v : conjugate_minimizer(l1, half).values) CHECK(v == 0.0);

    // prox of a constant field is the field itself
    Penalty tv{PenaltyKind::TVL2, 1.0, 500, 1e-12};
    ProxDiag diag;
    GridFunction x = conjugate_minimizer(tv, xi, &diag);
    for (double v : x.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_FALSE(diag.inexact);
}

TEST_CASE("conjugate minimizer optimality property") {
    GridSpec s = square_grid(7, -1.0, 1.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    for (Penalty theta : {Penalty{PenaltyKind::Quadratic, 1.7}, Penalty{PenaltyKind::L1L2, 0.8},
                          Penalty{PenaltyKind::TVL2, 1.2, 3000, 1e-13}}) {
        GridFunction xi = random_field(s, 17);
        GridFunction x = conjugate_minimizer(theta, xi);
        const double fx = penalty_value(theta, x) - inner_product(xi, x);
        const double tol = theta.kind == PenaltyKind::TVL2 ? 1e-6 : 1e-8;
        for (int t = 0; t < 10; ++t) {
            GridFunction d = GridFunction::zeros(s);
            for (auto& v : d.values) v = 0.3 * dist(rng);
            GridFunction xd = lin_comb(1.0, x, 1.0, d);
            const double fxd = penalty_value(theta, xd) - inner_product(xi, xd);
            CHECK(fx <= fxd + tol);
        }
    }
}

TEST_CASE("conjugate minimizer Lipschitz bound") {
    // ||grad Theta*(a) - grad Theta*(b)|| <= (||a-b||/(2 c0))^{1/(p-1)}
    // = beta*||a-b|| for p = 2
    GridSpec s = square_grid(8, -1.0, 1.0);
    for (Penalty theta : {Penalty{PenaltyKind::Quadratic, 2.2}, Penalty{PenaltyKind::L1L2, 1.4},
                          Penalty{PenaltyKind::TVL2, 0.9, 2000, 1e-12}}) {
        for (std::uint64_t seed : {21u, 22u, 23u}) {
            GridFunction a = random_field(s, seed);
            GridFunction b = random_field(s, seed + 50);
            GridFunction xa = conjugate_minimizer(theta, a);
            GridFunction xb = conjugate_minimizer(theta, b);
            const double lhs = norm(lin_comb(1.0, xa, -1.0, xb));
            const double rhs = theta.beta * norm(lin_comb(1.0, a, -1.0, b));
            const double tol = theta.kind == PenaltyKind::TVL2 ? 1e-6 : 1e-12;
            CHECK(lhs <= rhs + tol);
        }
    }
}

TEST_CASE("bregman distance of the quadratic penalty is the scaled square") {
    GridSpec s = square_grid(5, 0.0, 1.0);
    Penalty q{PenaltyKind::Quadratic, 1.6};
    GridFunction x = random_field(s, 31);
    GridFunction z = random_field(s, 32);
    GridFunction xi = x;
    for (auto& v : xi.values) v /= q.beta;  // subgradient of quadratic at x
    GridFunction d = lin_comb(1.0, z, -1.0, x);
    CHECK(bregman_distance(q, z, x, xi) ==
          doctest::Approx(inner_product(d, d) / (2.0 * q.beta)).epsilon(1e-12));
    CHECK(bregman_distance(q, x, x, xi) == doctest::Approx(0.0));
}

TEST_CASE("bregman distance matches the definitional oracle for L1L2") {
    GridSpec s{2, 2, 0.0, 1.0, 0.0, 1.0};
    Penalty l1{PenaltyKind::L1L2, 1.3};
    GridFunction xi = random_field(s, 41);
    GridFunction x = conjugate_minimizer(l1, xi);
    GridFunction z = random_field(s, 42);

    // independent loop evaluation of Theta(z) - Theta(x) - <xi, z-x>
    auto theta_of = [&](const GridFunction& f) {
        double q = 0.0, l = 0.0;
        for (double v : f.values) {
            q += v * v;
            l += std::abs(v);
        }
        const double w = s.cell_area();
        return w * q / (2.0 * l1.beta) + w * l;
    };
    double ip = 0.0;
    for (std::size_t k = 0; k < xi.values.size(); ++k)
        ip += s.cell_area() * xi.values[k] * (z.values[k] - x.values[k]);
    const double want = theta_of(z) - theta_of(x) - ip;
    CHECK(bregman_distance(l1, z, x, xi) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("bregman distance dominates the p-convexity lower bound") {
    GridSpec s = square_grid(6, -1.0, 1.0);
    for (Penalty theta : {Penalty{PenaltyKind::Quadratic, 1.1}, Penalty{PenaltyKind::L1L2, 0.7},
                          Penalty{PenaltyKind::TVL2, 1.5, 2000, 1e-12}}) {
        for (std::uint64_t seed : {61u, 62u, 63u}) {
            GridFunction xi = random_field(s, seed, -2.0, 2.0);
            GridFunction x = conjugate_minimizer(theta, xi);
            GridFunction z = random_field(s, seed + 10, -2.0, 2.0);
            GridFunction d = lin_comb(1.0, z, -1.0, x);
            const double lower = inner_product(d, d) / (2.0 * theta.beta);
            CHECK(bregman_distance(theta, z, x, xi) >= lower - 1e-10);
        }
    }
}

TEST_CASE("bregman distance flags a broken pair") {
    GridSpec s = square_grid(4, -1.0, 1.0);
    Penalty q{PenaltyKind::Quadratic, 1.0};
    GridFunction x = GridFunction::constant(s, 1.0);
    GridFunction xi = GridFunction::constant(s, 50.0);  // not x/beta
    GridFunction z = GridFunction::constant(s, 2.0);
    // D = (1/2)||z-x||^2 + <x/beta - xi, z - x> = 2 + 49*(-4) < 0
    CHECK_THROWS_AS(bregman_distance(q, z, x, xi), Error);
}
