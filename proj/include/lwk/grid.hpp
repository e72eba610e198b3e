#pragma once

#include <cstddef>
#include <vector>

namespace lwk {

/// Uniform rectangular grid. Values live at cell centers: cell (i,j) sits at
/// (x_min + (i+1/2)hx, y_min + (j+1/2)hy). Storage is row-major with x
/// fastest: linear index k = j*nx + i.
struct GridSpec {
    int nx = 1;
    int ny = 1;
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;

    double hx() const { return (x_max - x_min) / nx; }
    double hy() const { return (y_max - y_min) / ny; }
    double cell_area() const { return hx() * hy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double x_center(int i) const { return x_min + (i + 0.5) * hx(); }
    double y_center(int j) const { return y_min + (j + 0.5) * hy(); }

    bool operator==(const GridSpec&) const = default;

    /// Throws ParameterError unless nx,ny >= 1 and the bounds are ordered.
    void validate() const;
};

/// Square grid covering [lo,hi]^2 with n cells per side.
GridSpec square_grid(int n, double lo, double hi);

/// Scalar field on a GridSpec. Represents primal iterates, dual iterates
/// (identified with primal coordinates), phantoms, and PDE states.
struct GridFunction {
    GridSpec spec;
    std::vector<double> values;

    static GridFunction zeros(const GridSpec& s);
    static GridFunction constant(const GridSpec& s, double v);

    std::size_t size() const { return values.size(); }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * spec.nx + i]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * spec.nx + i]; }
};

/// Measurement vector with the quadrature weights of its data-space inner
/// product (r_k dr for circular means, ds for line data, cell area for
/// full-field data).
struct DataVector {
    std::vector<double> values;
    std::vector<double> weights;

    std::size_t size() const { return values.size(); }
};

/// Discrete L2(Omega) pairing: hx*hy * sum_k a_k b_k.
double inner_product(const GridFunction& a, const GridFunction& b);
double norm(const GridFunction& a);

/// Weighted data-space pairing: sum_k w_k a_k b_k. Requires equal lengths
/// and identical weights.
double data_inner_product(const DataVector& a, const DataVector& b);
double data_norm(const DataVector& a);

/// Pointwise alpha*a + beta*b; specs must match.
GridFunction lin_comb(double alpha, const GridFunction& a, double beta, const GridFunction& b);

/// a += s*b, in place (specs must match).
void add_scaled(GridFunction& a, double s, const GridFunction& b);

bool all_finite(const GridFunction& a);

} // namespace lwk
