#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lwk/errors.hpp"
#include "lwk/grid.hpp"

using namespace lwk;

TEST_CASE("grid spec geometry") {
    GridSpec s = square_grid(4, -1.0, 1.0);
    CHECK(s.hx() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.hy() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.size() == 16);
    // cell centers: first at min + h/2, last at max - h/2
    CHECK(s.x_center(0) == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(s.x_center(3) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(s.y_center(0) == doctest::Approx(-0.75).epsilon(1e-15));

    GridSpec r{5, 3, 0.0, 1.0, -2.0, 1.0};
    CHECK(r.hx() == doctest::Approx(0.2));
    CHECK(r.hy() == doctest::Approx(1.0));
    CHECK(r.cell_area() == doctest::Approx(0.2));
}

TEST_CASE("grid spec validation") {
    GridSpec bad = square_grid(4, -1.0, 1.0);
    bad.nx = 0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    GridSpec flipped = square_grid(4, -1.0, 1.0);
    flipped.x_max = -2.0;
    CHECK_THROWS_AS(flipped.validate(), ParameterError);
    CHECK_THROWS_AS(square_grid(0, 0.0, 1.0), ParameterError);
}

TEST_CASE("linear index is row-major with x fastest") {
    GridSpec s = square_grid(4, -1.0, 1.0);
    GridFunction f = GridFunction::zeros(s);
    f.at(1, 2) = 7.0;
    CHECK(f.values[2 * 4 + 1] == 7.0);
    f.values[3] = -2.0;  // k=3 -> (i=3, j=0)
    CHECK(f.at(3, 0) == -2.0);
}

TEST_CASE("inner product of constant fields equals area scaling") {
    // integral of 1*1 over [-1,1]^2 is 4, independent of resolution
    for (int n : {4, 7, 16}) {
        GridSpec s = square_grid(n, -1.0, 1.0);
        GridFunction one = GridFunction::constant(s, 1.0);
        CHECK(inner_product(one, one) == doctest::Approx(4.0).epsilon(1e-14));
    }
}

TEST_CASE("inner product of disjointly supported fields is zero") {
    GridSpec s = square_grid(8, -1.0, 1.0);
    GridFunction a = GridFunction::zeros(s);
    GridFunction b = GridFunction::zeros(s);
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 4; ++i)
            a.at(i, j) = 1.5;
    for (int j = 0; j < 8; ++j)
        for (int i = 4; i < 8; ++i)
            b.at(i, j) = -3.0;
    CHECK(inner_product(a, b) == 0.0);
}

TEST_CASE("inner product matches an independent summation loop") {
    GridSpec s{4, 4, 0.0, 2.0, -1.0, 0.0};
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GridFunction a = GridFunction::zeros(s);
    GridFunction b = GridFunction::zeros(s);
    for (auto& v : a.values) v = dist(rng);
    for (auto& v : b.values) v = dist(rng);

    // oracle: explicit double loop over (i,j) against at()
    double acc = 0.0;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i)
            acc += a.at(i, j) * b.at(i, j);
    acc *= s.hx() * s.hy();

    CHECK(inner_product(a, b) == doctest::Approx(acc).epsilon(1e-14));
}

TEST_CASE("norm properties") {
    GridSpec s = square_grid(9, -1.0, 1.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    GridFunction a = GridFunction::zeros(s);
    GridFunction b = GridFunction::zeros(s);
    for (auto& v : a.values) v = dist(rng);
    for (auto& v : b.values) v = dist(rng);

    // scaling: ||c a|| = |c| ||a||
    GridFunction ca = lin_comb(-3.5, a, 0.0, b);
    CHECK(norm(ca) == doctest::Approx(3.5 * norm(a)).epsilon(1e-13));

    // Cauchy-Schwarz and triangle inequality
    CHECK(std::abs(inner_product(a, b)) <= norm(a) * norm(b) * (1 + 1e-13));
    GridFunction apb = lin_comb(1.0, a, 1.0, b);
    CHECK(norm(apb) <= norm(a) + norm(b) + 1e-13);
}

TEST_CASE("lin_comb and add_scaled agree") {
    GridSpec s = square_grid(5, 0.0, 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GridFunction a = GridFunction::zeros(s);
    GridFunction b = GridFunction::zeros(s);
    for (auto& v : a.values) v = dist(rng);
    for (auto& v : b.values) v = dist(rng);

    GridFunction c = lin_comb(1.0, a, -0.25, b);
    GridFunction d = a;
    add_scaled(d, -0.25, b);
    for (std::size_t k = 0; k < c.values.size(); ++k)
        CHECK(c.values[k] == d.values[k]);
}

TEST_CASE("shape mismatches throw") {
    GridFunction a = GridFunction::zeros(square_grid(4, -1.0, 1.0));
    GridFunction b = GridFunction::zeros(square_grid(5, -1.0, 1.0));
    CHECK_THROWS_AS(inner_product(a, b), ShapeError);
    CHECK_THROWS_AS(lin_comb(1.0, a, 1.0, b), ShapeError);
    GridFunction c = a;
    CHECK_THROWS_AS(add_scaled(c, 1.0, b), ShapeError);

    // same cell counts, different domain: still a mismatch
    GridFunction e = GridFunction::zeros(square_grid(4, 0.0, 1.0));
    CHECK_THROWS_AS(inner_product(a, e), ShapeError);
}

TEST_CASE("data inner product uses the stored weights") {
    DataVector a{{1.0, 2.0, 3.0}, {0.5, 1.0, 2.0}};
    DataVector b{{4.0, -1.0, 0.5}, {0.5, 1.0, 2.0}};
    // oracle by hand: 0.5*1*4 + 1*2*(-1) + 2*3*0.5 = 2 - 2 + 3 = 3
    CHECK(data_inner_product(a, b) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(data_norm(a) == doctest::Approx(std::sqrt(0.5 + 4.0 + 18.0)).epsilon(1e-15));

    DataVector wrong_len{{1.0}, {1.0}};
    CHECK_THROWS_AS(data_inner_product(a, wrong_len), ShapeError);
    DataVector wrong_w{{4.0, -1.0, 0.5}, {0.5, 1.0, 2.5}};
    CHECK_THROWS_AS(data_inner_product(a, wrong_w), ShapeError);
}

TEST_CASE("all_finite flags NaN and infinity") {
    GridFunction a = GridFunction::constant(square_grid(3, 0.0, 1.0), 1.0);
    CHECK(all_finite(a));
    a.values[4] = std::nan("");
    CHECK_FALSE(all_finite(a));
    a.values[4] = INFINITY;
    CHECK_FALSE(all_finite(a));
}
