#include "lwk/pde.hpp"

#include <cmath>
#include <cstdio>

#include "lwk/errors.hpp"

namespace lwk {

namespace {

constexpr double kMinCoefficient = -0.5;

void apply_stencil(const GridSpec& s, const double* c, const double* u, double* out) {
    const int nx = s.nx, ny = s.ny;
    const double ihx2 = 1.0 / (s.hx() * s.hx());
    const double ihy2 = 1.0 / (s.hy() * s.hy());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            const double uc = u[k];
            // ghost value -u_c makes the neighbour difference (uc - (-uc)) = 2*uc
            const double ul = (i > 0) ? u[k - 1] : -uc;
            const double ur = (i + 1 < nx) ? u[k + 1] : -uc;
            const double ud = (j > 0) ? u[k - nx] : -uc;
            const double uu = (j + 1 < ny) ? u[k + nx] : -uc;
            out[k] = (2.0 * uc - ul - ur) * ihx2 + (2.0 * uc - ud - uu) * ihy2 +
                     (c ? c[k] : 0.0) * uc;
        }
    }
}

GridFunction cg_solve(const GridSpec& s, const double* c, const GridFunction& rhs, double rtol,
                      int max_iters, const char* what) {
    const std::size_t n = rhs.size();
    GridFunction u = GridFunction::zeros(s);

    const double rhs_norm = norm(rhs);
    if (rhs_norm == 0.0)
        return u;

    // Jacobi scaling: diagonal of the stencil
    std::vector<double> inv_diag(n);
    {
        const double ihx2 = 1.0 / (s.hx() * s.hx());
        const double ihy2 = 1.0 / (s.hy() * s.hy());
        for (int j = 0; j < s.ny; ++j)
            for (int i = 0; i < s.nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * s.nx + i;
                const double dx = (i == 0 || i + 1 == s.nx) ? 3.0 : 2.0;
                const double dy = (j == 0 || j + 1 == s.ny) ? 3.0 : 2.0;
                inv_diag[k] = 1.0 / (dx * ihx2 + dy * ihy2 + (c ? c[k] : 0.0));
            }
    }

    GridFunction r = rhs;  // residual (u = 0 start)
    GridFunction z = GridFunction::zeros(s);
    for (std::size_t k = 0; k < n; ++k)
        z.values[k] = inv_diag[k] * r.values[k];
    GridFunction p = z;
    GridFunction ap = GridFunction::zeros(s);
    double rz = inner_product(r, z);

    for (int it = 0; it < max_iters; ++it) {
        apply_stencil(s, c, p.values.data(), ap.values.data());
        const double pap = inner_product(p, ap);
        if (!(pap > 0.0)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s: system not positive definite (p'Ap = %.3e)",
                          what, pap);
            throw SolverError(buf);
        }
        const double alpha = rz / pap;
        add_scaled(u, alpha, p);
        add_scaled(r, -alpha, ap);
        if (norm(r) <= rtol * rhs_norm)
            return u;
        for (std::size_t k = 0; k < n; ++k)
            z.values[k] = inv_diag[k] * r.values[k];
        const double rz_new = inner_product(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k)
            p.values[k] = z.values[k] + beta * p.values[k];
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: no convergence in %d iterations (residual %.3e, target %.3e)",
                  what, max_iters, norm(r), rtol * rhs_norm);
    throw SolverError(buf);
}

void check_admissible(const GridFunction& c) {
    for (double v : c.values)
        if (!(v >= kMinCoefficient)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "elliptic coefficient below admissibility bound: %.6f < %.2f", v,
                          kMinCoefficient);
            throw SolverError(buf);
        }
}

} // namespace

GridFunction elliptic_apply_operator(const GridSpec& s, const GridFunction& c,
                                     const GridFunction& u) {
    if (!(c.spec == s) || !(u.spec == s))
        throw ShapeError("elliptic_apply_operator: grid mismatch");
    GridFunction out = GridFunction::zeros(s);
    apply_stencil(s, c.values.data(), u.values.data(), out.values.data());
    return out;
}

GridFunction elliptic_solve(const GridSpec& s, const GridFunction& c, const GridFunction& rhs,
                            double rtol, int max_iters) {
    if (!(c.spec == s) || !(rhs.spec == s))
        throw ShapeError("elliptic_solve: grid mismatch");
    check_admissible(c);
    return cg_solve(s, c.values.data(), rhs, rtol, max_iters, "elliptic_solve");
}

GridFunction dirichlet_rhs(const GridSpec& s, const GridFunction& f,
                           const std::function<double(double, double)>& g) {
    if (!(f.spec == s))
        throw ShapeError("dirichlet_rhs: grid mismatch");
    GridFunction rhs = f;
    const double cx = 2.0 / (s.hx() * s.hx());
    const double cy = 2.0 / (s.hy() * s.hy());
    for (int j = 0; j < s.ny; ++j) {
        rhs.at(0, j) += cx * g(s.x_min, s.y_center(j));
        rhs.at(s.nx - 1, j) += cx * g(s.x_max, s.y_center(j));
    }
    for (int i = 0; i < s.nx; ++i) {
        rhs.at(i, 0) += cy * g(s.x_center(i), s.y_min);
        rhs.at(i, s.ny - 1) += cy * g(s.x_center(i), s.y_max);
    }
    return rhs;
}

GridFunction helmholtz_apply(const GridSpec& s, const GridFunction& u) {
    if (!(u.spec == s))
        throw ShapeError("helmholtz_apply: grid mismatch");
    GridFunction one = GridFunction::constant(s, 1.0);
    GridFunction out = GridFunction::zeros(s);
    apply_stencil(s, one.values.data(), u.values.data(), out.values.data());
    return out;
}

GridFunction helmholtz_solve(const GridSpec& s, const GridFunction& rhs, double rtol,
                             int max_iters) {
    if (!(rhs.spec == s))
        throw ShapeError("helmholtz_solve: grid mismatch");
    GridFunction one = GridFunction::constant(s, 1.0);
    return cg_solve(s, one.values.data(), rhs, rtol, max_iters, "helmholtz_solve");
}

} // namespace lwk
