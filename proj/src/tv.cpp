#include "lwk/tv.hpp"

#include <algorithm>
#include <cmath>

#include "lwk/errors.hpp"

namespace lwk {

namespace {

// gx_{ij} = (z_{i+1,j}-z_{ij})/hx for i<nx-1, zero at the last column;
// gy analogous with the last row zero.
void forward_diff(const GridSpec& s, const std::vector<double>& z, std::vector<double>& gx,
                  std::vector<double>& gy) {
    const int nx = s.nx, ny = s.ny;
    const double ihx = 1.0 / s.hx(), ihy = 1.0 / s.hy();
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = row + i;
            gx[k] = (i + 1 < nx) ? (z[k + 1] - z[k]) * ihx : 0.0;
            gy[k] = (j + 1 < ny) ? (z[k + nx] - z[k]) * ihy : 0.0;
        }
    }
}

// Transpose of forward_diff: out_{ij} = (px_{i-1,j}-px_{ij})/hx
//                                     + (py_{i,j-1}-py_{ij})/hy,
// with out-of-range dual entries treated as zero. The dual fields keep
// zeros in the last column/row, so no special casing there.
void diff_transpose(const GridSpec& s, const std::vector<double>& px,
                    const std::vector<double>& py, std::vector<double>& out) {
    const int nx = s.nx, ny = s.ny;
    const double ihx = 1.0 / s.hx(), ihy = 1.0 / s.hy();
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = row + i;
            double v = -px[k] * ihx - py[k] * ihy;
            if (i > 0) v += px[k - 1] * ihx;
            if (j > 0) v += py[k - nx] * ihy;
            out[k] = v;
        }
    }
}

// Unweighted objective 1/2*sum (z-v)^2 + lambda * sum sqrt(gx^2+gy^2);
// the cell-area weight multiplies both terms uniformly and is applied
// only for reporting.
double merit(const GridSpec& s, const std::vector<double>& z, const std::vector<double>& v,
             double lambda) {
    const int nx = s.nx, ny = s.ny;
    const double ihx = 1.0 / s.hx(), ihy = 1.0 / s.hy();
    double fid = 0.0, tv = 0.0;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = row + i;
            const double d = z[k] - v[k];
            fid += d * d;
            const double gx = (i + 1 < nx) ? (z[k + 1] - z[k]) * ihx : 0.0;
            const double gy = (j + 1 < ny) ? (z[k + nx] - z[k]) * ihy : 0.0;
            tv += std::sqrt(gx * gx + gy * gy);
        }
    }
    return 0.5 * fid + lambda * tv;
}

} // namespace

double tv_value(const GridFunction& x) {
    const GridSpec& s = x.spec;
    const int nx = s.nx, ny = s.ny;
    const double ihx = 1.0 / s.hx(), ihy = 1.0 / s.hy();
    double tv = 0.0;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = row + i;
            const double gx = (i + 1 < nx) ? (x.values[k + 1] - x.values[k]) * ihx : 0.0;
            const double gy = (j + 1 < ny) ? (x.values[k + nx] - x.values[k]) * ihy : 0.0;
            tv += std::sqrt(gx * gx + gy * gy);
        }
    }
    return s.cell_area() * tv;
}

GridFunction tv_prox(const GridFunction& v, double lambda, int max_iters, double tol,
                     TvProxDiag* diag) {
    if (lambda < 0.0)
        throw ParameterError("tv_prox: lambda must be >= 0");
    if (max_iters < 1)
        throw ParameterError("tv_prox: max_iters must be >= 1");

    const GridSpec& s = v.spec;
    const std::size_t n = v.size();
    const double area = s.cell_area();

    if (lambda == 0.0) {
        if (diag) *diag = TvProxDiag{0, true, 0.0, {}};
        return v;
    }

    // min_p 1/2*||v - lambda*D^T p||^2 over pointwise |p| <= 1; its gradient
    // -lambda*D(v - lambda*D^T p) has Lipschitz constant lambda^2*L_D with
    // L_D = 4/hx^2 + 4/hy^2, giving the step below.
    const double L_D = 4.0 / (s.hx() * s.hx()) + 4.0 / (s.hy() * s.hy());
    const double step = 1.0 / (lambda * L_D);

    std::vector<double> px(n, 0.0), py(n, 0.0);    // accepted dual iterate
    std::vector<double> yx(n, 0.0), yy(n, 0.0);    // extrapolated point
    std::vector<double> gx(n), gy(n), z(n), dt(n);

    GridFunction best{s, v.values};
    double best_merit = merit(s, v.values, v.values, lambda);
    double prev_merit = best_merit;
    double t = 1.0;

    TvProxDiag d;
    d.trace.reserve(static_cast<std::size_t>(max_iters));

    for (int k = 1; k <= max_iters; ++k) {
        // projected gradient step on the dual from the extrapolated point
        diff_transpose(s, yx, yy, dt);
        for (std::size_t m = 0; m < n; ++m)
            z[m] = v.values[m] - lambda * dt[m];
        forward_diff(s, z, gx, gy);
        for (std::size_t m = 0; m < n; ++m) {
            double ux = yx[m] + step * gx[m];
            double uy = yy[m] + step * gy[m];
            const double mag = std::sqrt(ux * ux + uy * uy);
            if (mag > 1.0) {
                ux /= mag;
                uy /= mag;
            }
            // reuse yx/yy as scratch for the new point; the old extrapolation
            // value is no longer needed at index m
            yx[m] = ux;
            yy[m] = uy;
        }
        std::swap(px, yx);  // px = new dual point, yx = previous accepted
        std::swap(py, yy);

        diff_transpose(s, px, py, dt);
        for (std::size_t m = 0; m < n; ++m)
            z[m] = v.values[m] - lambda * dt[m];
        const double f = merit(s, z, v.values, lambda);
        if (f < best_merit) {
            best_merit = f;
            best.values = z;
        }
        d.trace.push_back(area * best_merit);
        d.iterations = k;

        const double rel = std::abs(f - prev_merit) / std::max(std::abs(f), 1e-300);
        prev_merit = f;
        if (rel <= tol) {
            d.converged = true;
            break;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double gamma = (t - 1.0) / t_next;
        t = t_next;
        // yx currently holds the previous accepted point; overwrite with the
        // FISTA extrapolation px + gamma*(px - previous)
        for (std::size_t m = 0; m < n; ++m) {
            yx[m] = px[m] + gamma * (px[m] - yx[m]);
            yy[m] = py[m] + gamma * (py[m] - yy[m]);
        }
    }

    d.objective = area * best_merit;
    if (diag) *diag = std::move(d);
    return best;
}

} // namespace lwk
