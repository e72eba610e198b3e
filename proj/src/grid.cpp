#include "lwk/grid.hpp"

#include <cmath>
#include <cstdio>

#include "lwk/errors.hpp"

namespace lwk {

void GridSpec::validate() const {
    if (nx < 1 || ny < 1)
        throw ParameterError("GridSpec: nx and ny must be >= 1");
    if (!(x_min < x_max) || !(y_min < y_max))
        throw ParameterError("GridSpec: domain bounds must satisfy min < max");
}

GridSpec square_grid(int n, double lo, double hi) {
    GridSpec s;
    s.nx = n;
    s.ny = n;
    s.x_min = lo;
    s.x_max = hi;
    s.y_min = lo;
    s.y_max = hi;
    s.validate();
    return s;
}

GridFunction GridFunction::zeros(const GridSpec& s) {
    s.validate();
    return GridFunction{s, std::vector<double>(s.size(), 0.0)};
}

GridFunction GridFunction::constant(const GridSpec& s, double v) {
    s.validate();
    return GridFunction{s, std::vector<double>(s.size(), v)};
}

namespace {

void require_same_spec(const GridFunction& a, const GridFunction& b, const char* where) {
    if (!(a.spec == b.spec) || a.values.size() != b.values.size()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s: grid specs differ (%dx%d vs %dx%d)", where,
                      a.spec.nx, a.spec.ny, b.spec.nx, b.spec.ny);
        throw ShapeError(buf);
    }
}

} // namespace

double inner_product(const GridFunction& a, const GridFunction& b) {
    require_same_spec(a, b, "inner_product");
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        s += a.values[k] * b.values[k];
    return a.spec.cell_area() * s;
}

double norm(const GridFunction& a) {
    return std::sqrt(inner_product(a, a));
}

double data_inner_product(const DataVector& a, const DataVector& b) {
    if (a.values.size() != b.values.size() || a.weights.size() != b.weights.size() ||
        a.values.size() != a.weights.size())
        throw ShapeError("data_inner_product: length mismatch");
    if (a.weights != b.weights)
        throw ShapeError("data_inner_product: weight mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        s += a.weights[k] * a.values[k] * b.values[k];
    return s;
}

double data_norm(const DataVector& a) {
    return std::sqrt(data_inner_product(a, a));
}

GridFunction lin_comb(double alpha, const GridFunction& a, double beta, const GridFunction& b) {
    require_same_spec(a, b, "lin_comb");
    GridFunction out{a.spec, std::vector<double>(a.values.size())};
    for (std::size_t k = 0; k < a.values.size(); ++k)
        out.values[k] = alpha * a.values[k] + beta * b.values[k];
    return out;
}

void add_scaled(GridFunction& a, double s, const GridFunction& b) {
    require_same_spec(a, b, "add_scaled");
    for (std::size_t k = 0; k < a.values.size(); ++k)
        a.values[k] += s * b.values[k];
}

bool all_finite(const GridFunction& a) {
    for (double v : a.values)
        if (!std::isfinite(v))
            return false;
    return true;
}

} // namespace lwk
