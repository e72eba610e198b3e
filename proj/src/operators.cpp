#include "lwk/operators.hpp"

#include <cmath>
#include <random>
#include <string>

#include "lwk/errors.hpp"
#include "lwk/pde.hpp"

namespace lwk {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Cell-centered bilinear interpolation, zero outside the grid.
double bilinear_gather(const GridFunction& f, double x, double y) {
    const GridSpec& s = f.spec;
    const double gx = (x - s.x_min) / s.hx() - 0.5;
    const double gy = (y - s.y_min) / s.hy() - 0.5;
    const double fi = std::floor(gx);
    const double fj = std::floor(gy);
    const int i0 = static_cast<int>(fi);
    const int j0 = static_cast<int>(fj);
    const double tx = gx - fi;
    const double ty = gy - fj;
    double acc = 0.0;
    for (int dj = 0; dj < 2; ++dj) {
        const int j = j0 + dj;
        if (j < 0 || j >= s.ny)
            continue;
        const double wy = dj ? ty : 1.0 - ty;
        for (int di = 0; di < 2; ++di) {
            const int i = i0 + di;
            if (i < 0 || i >= s.nx)
                continue;
            const double wx = di ? tx : 1.0 - tx;
            acc += wx * wy * f.at(i, j);
        }
    }
    return acc;
}

// Transpose of bilinear_gather: scatter coef with the same four weights.
void bilinear_splat(GridFunction& f, double x, double y, double coef) {
    const GridSpec& s = f.spec;
    const double gx = (x - s.x_min) / s.hx() - 0.5;
    const double gy = (y - s.y_min) / s.hy() - 0.5;
    const double fi = std::floor(gx);
    const double fj = std::floor(gy);
    const int i0 = static_cast<int>(fi);
    const int j0 = static_cast<int>(fj);
    const double tx = gx - fi;
    const double ty = gy - fj;
    for (int dj = 0; dj < 2; ++dj) {
        const int j = j0 + dj;
        if (j < 0 || j >= s.ny)
            continue;
        const double wy = dj ? ty : 1.0 - ty;
        for (int di = 0; di < 2; ++di) {
            const int i = i0 + di;
            if (i < 0 || i >= s.nx)
                continue;
            const double wx = di ? tx : 1.0 - tx;
            f.at(i, j) += wx * wy * coef;
        }
    }
}

void require_data_size(const DataVector& w, std::size_t n, const char* who) {
    if (w.values.size() != n)
        throw ShapeError(std::string(who) + ": data length mismatch");
}

} // namespace

double ForwardOperator::x_inner(const GridFunction& a, const GridFunction& b) const {
    return inner_product(a, b);
}

double ForwardOperator::x_norm(const GridFunction& a) const {
    return std::sqrt(x_inner(a, a));
}

DataVector ForwardOperator::make_data(std::vector<double> values) const {
    if (values.size() != data_weights().size())
        throw ShapeError("make_data: length mismatch");
    return DataVector{std::move(values), data_weights()};
}

// ---------------------------------------------------------------- circular

CircularMeanOp::CircularMeanOp(const GridSpec& grid, Vec2 center, int n_radii, double R,
                               int n_angles)
    : grid_(grid), center_(center) {
    grid_.validate();
    if (n_radii < 1 || R <= 0.0)
        throw ParameterError("CircularMeanOp: need n_radii >= 1 and R > 0");
    const double dr = 2.0 * R / n_radii;
    radii_.resize(n_radii);
    weights_.resize(n_radii);
    for (int k = 0; k < n_radii; ++k) {
        radii_[k] = (k + 0.5) * dr;
        weights_[k] = radii_[k] * dr;
    }
    n_angles_ = n_angles > 0 ? n_angles : 4 * std::max(grid.nx, grid.ny);
}

CircularMeanOp::CircularMeanOp(const GridSpec& grid, Vec2 center, std::vector<double> radii,
                               double dr, int n_angles)
    : grid_(grid), center_(center), radii_(std::move(radii)) {
    grid_.validate();
    if (radii_.empty() || dr <= 0.0 || n_angles < 1)
        throw ParameterError("CircularMeanOp: bad radii/dr/n_angles");
    weights_.resize(radii_.size());
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        if (radii_[k] <= 0.0)
            throw ParameterError("CircularMeanOp: radii must be positive");
        weights_[k] = radii_[k] * dr;
    }
    n_angles_ = n_angles;
}

DataVector CircularMeanOp::apply(const GridFunction& f) const {
    if (!(f.spec == grid_))
        throw ShapeError("CircularMeanOp::apply: grid mismatch");
    std::vector<double> out(radii_.size());
    const double dphi = 2.0 * kPi / n_angles_;
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        const double r = radii_[k];
        double acc = 0.0;
        for (int m = 0; m < n_angles_; ++m) {
            const double phi = m * dphi;
            acc += bilinear_gather(f, center_.x + r * std::cos(phi), center_.y + r * std::sin(phi));
        }
        out[k] = acc / n_angles_;
    }
    return DataVector{std::move(out), weights_};
}

DataVector CircularMeanOp::deriv(const GridFunction&, const GridFunction& h) const {
    return apply(h);
}

GridFunction CircularMeanOp::deriv_adjoint(const GridFunction&, const DataVector& w) const {
    require_data_size(w, radii_.size(), "CircularMeanOp::deriv_adjoint");
    GridFunction out = GridFunction::zeros(grid_);
    const double dphi = 2.0 * kPi / n_angles_;
    const double inv_cell = 1.0 / grid_.cell_area();
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        const double r = radii_[k];
        const double coef = weights_[k] * w.values[k] * inv_cell / n_angles_;
        if (coef == 0.0)
            continue;
        for (int m = 0; m < n_angles_; ++m) {
            const double phi = m * dphi;
            bilinear_splat(out, center_.x + r * std::cos(phi), center_.y + r * std::sin(phi), coef);
        }
    }
    return out;
}

std::optional<double> CircularMeanOp::norm_bound() const {
    return 2.0 * std::sqrt(kPi);
}

// ------------------------------------------------------------------- radon

RadonOp::RadonOp(const GridSpec& grid, double angle, int n_offsets, double s_max)
    : grid_(grid), angle_(angle) {
    grid_.validate();
    if (n_offsets < 1 || s_max <= 0.0)
        throw ParameterError("RadonOp: need n_offsets >= 1 and s_max > 0");
    sigma_ = {std::cos(angle), std::sin(angle)};
    const double ds = 2.0 * s_max / n_offsets;
    s_.resize(n_offsets);
    weights_.assign(n_offsets, ds);
    for (int k = 0; k < n_offsets; ++k)
        s_[k] = -s_max + (k + 0.5) * ds;
    // the line sweep must cover the whole domain: half the diagonal suffices
    const double dx = grid.x_max - grid.x_min;
    const double dy = grid.y_max - grid.y_min;
    const double t_max = 0.5 * std::sqrt(dx * dx + dy * dy);
    dt_ = 0.5 * std::min(grid.hx(), grid.hy());
    n_t_ = static_cast<int>(std::ceil(2.0 * t_max / dt_));
    t0_ = -t_max + 0.5 * dt_;
}

DataVector RadonOp::apply(const GridFunction& f) const {
    if (!(f.spec == grid_))
        throw ShapeError("RadonOp::apply: grid mismatch");
    std::vector<double> out(s_.size());
    const double px = -sigma_.y, py = sigma_.x;  // line direction
    for (std::size_t k = 0; k < s_.size(); ++k) {
        const double bx = s_[k] * sigma_.x, by = s_[k] * sigma_.y;
        double acc = 0.0;
        for (int l = 0; l < n_t_; ++l) {
            const double t = t0_ + l * dt_;
            acc += bilinear_gather(f, bx + t * px, by + t * py);
        }
        out[k] = dt_ * acc;
    }
    return DataVector{std::move(out), weights_};
}

DataVector RadonOp::deriv(const GridFunction&, const GridFunction& h) const {
    return apply(h);
}

GridFunction RadonOp::deriv_adjoint(const GridFunction&, const DataVector& w) const {
    require_data_size(w, s_.size(), "RadonOp::deriv_adjoint");
    GridFunction out = GridFunction::zeros(grid_);
    const double px = -sigma_.y, py = sigma_.x;
    const double inv_cell = 1.0 / grid_.cell_area();
    for (std::size_t k = 0; k < s_.size(); ++k) {
        const double coef = weights_[k] * w.values[k] * dt_ * inv_cell;
        if (coef == 0.0)
            continue;
        const double bx = s_[k] * sigma_.x, by = s_[k] * sigma_.y;
        for (int l = 0; l < n_t_; ++l) {
            const double t = t0_ + l * dt_;
            bilinear_splat(out, bx + t * px, by + t * py, coef);
        }
    }
    return out;
}

// --------------------------------------------------------------- schlieren

SchlierenOp::SchlierenOp(const GridSpec& grid, double angle, int n_offsets, double s_max,
                         double eta, double solve_rtol, int solve_max_iters)
    : radon_(grid, angle, n_offsets, s_max),
      eta_(eta),
      solve_rtol_(solve_rtol),
      solve_max_iters_(solve_max_iters) {}

DataVector SchlierenOp::apply(const GridFunction& f) const {
    DataVector r = radon_.apply(f);
    for (auto& v : r.values) v *= v;
    return r;
}

DataVector SchlierenOp::deriv(const GridFunction& f, const GridFunction& h) const {
    DataVector rf = radon_.apply(f);
    DataVector rh = radon_.apply(h);
    for (std::size_t k = 0; k < rf.values.size(); ++k)
        rf.values[k] = 2.0 * rf.values[k] * rh.values[k];
    return rf;
}

GridFunction SchlierenOp::deriv_adjoint(const GridFunction& f, const DataVector& w) const {
    require_data_size(w, radon_.offsets().size(), "SchlierenOp::deriv_adjoint");
    DataVector rf = radon_.apply(f);
    for (std::size_t k = 0; k < rf.values.size(); ++k)
        rf.values[k] = 2.0 * rf.values[k] * w.values[k];
    GridFunction bp = radon_.deriv_adjoint(f, rf);
    return helmholtz_solve(radon_.grid_, bp, solve_rtol_, solve_max_iters_);
}

double SchlierenOp::x_inner(const GridFunction& a, const GridFunction& b) const {
    return inner_product(a, helmholtz_apply(radon_.grid_, b));
}

// ---------------------------------------------------------------- elliptic

EllipticParamOp::EllipticParamOp(const GridSpec& grid, GridFunction f,
                                 std::function<double(double, double)> g, double eta,
                                 double solve_rtol, int solve_max_iters)
    : grid_(grid),
      f_(std::move(f)),
      g_(std::move(g)),
      eta_(eta),
      rtol_(solve_rtol),
      max_iters_(solve_max_iters) {
    grid_.validate();
    if (!(f_.spec == grid_))
        throw ShapeError("EllipticParamOp: source grid mismatch");
    if (!g_)
        throw ParameterError("EllipticParamOp: boundary data required");
    weights_.assign(grid_.size(), grid_.cell_area());
}

GridFunction EllipticParamOp::solve_at(const GridFunction& c, const GridFunction& rhs) const {
    return elliptic_solve(grid_, c, rhs, rtol_, max_iters_);
}

GridFunction EllipticParamOp::state(const GridFunction& c) const {
    if (!(c.spec == grid_))
        throw ShapeError("EllipticParamOp: coefficient grid mismatch");
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (state_cache_ && state_cache_->first == c.values)
            return state_cache_->second;
    }
    GridFunction u = solve_at(c, dirichlet_rhs(grid_, f_, g_));
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        state_cache_ = std::make_shared<const std::pair<std::vector<double>, GridFunction>>(
            c.values, u);
    }
    return u;
}

DataVector EllipticParamOp::apply(const GridFunction& c) const {
    return DataVector{state(c).values, weights_};
}

DataVector EllipticParamOp::deriv(const GridFunction& c, const GridFunction& h) const {
    if (!(h.spec == grid_))
        throw ShapeError("EllipticParamOp::deriv: grid mismatch");
    const GridFunction u = state(c);
    GridFunction rhs = GridFunction::zeros(grid_);
    for (std::size_t k = 0; k < rhs.values.size(); ++k)
        rhs.values[k] = h.values[k] * u.values[k];
    GridFunction w = solve_at(c, rhs);
    for (auto& v : w.values) v = -v;
    return DataVector{std::move(w.values), weights_};
}

GridFunction EllipticParamOp::deriv_adjoint(const GridFunction& c, const DataVector& w) const {
    require_data_size(w, grid_.size(), "EllipticParamOp::deriv_adjoint");
    const GridFunction u = state(c);
    GridFunction rhs{grid_, w.values};
    GridFunction v = solve_at(c, rhs);
    for (std::size_t k = 0; k < v.values.size(); ++k)
        v.values[k] *= -u.values[k];
    return v;
}

// -------------------------------------------------------------- norm bound

double operator_norm_estimate(const ForwardOperator& op, const GridFunction& x0, int iters,
                              std::uint64_t seed) {
    if (iters < 1)
        throw ParameterError("operator_norm_estimate: iters must be >= 1");
    GridFunction f = GridFunction::zeros(x0.spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : f.values) v = dist(rng);
    double fn = op.x_norm(f);
    if (fn == 0.0)
        return 0.0;
    for (auto& v : f.values) v /= fn;

    double rayleigh = 0.0;
    for (int it = 0; it < iters; ++it) {
        GridFunction g = op.deriv_adjoint(x0, op.deriv(x0, f));
        rayleigh = op.x_inner(f, g);  // = ||F' f||_Y^2 for unit f
        const double gn = op.x_norm(g);
        if (gn == 0.0)
            return 0.0;
        for (std::size_t k = 0; k < g.values.size(); ++k)
            f.values[k] = g.values[k] / gn;
    }
    return std::sqrt(std::max(0.0, rayleigh));
}

} // namespace lwk
