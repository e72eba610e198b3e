#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "lwk/grid.hpp"

namespace lwk {

/// One measurement map F_i with its linearization. Adjoints are exact
/// transposes of the discrete forward maps with respect to the declared
/// weighted inner products; analytic adjoint formulas are used only as
/// refinement cross-checks in tests.
class ForwardOperator {
public:
    virtual ~ForwardOperator() = default;

    virtual DataVector apply(const GridFunction& x) const = 0;
    virtual DataVector deriv(const GridFunction& x, const GridFunction& h) const = 0;
    virtual GridFunction deriv_adjoint(const GridFunction& x, const DataVector& w) const = 0;

    /// Quadrature weights of the data-space inner product.
    virtual const std::vector<double>& data_weights() const = 0;

    /// Tangential-cone constant; 0 for linear maps, an assumed estimate for
    /// the nonlinear ones.
    virtual double eta_bound() const { return 0.0; }

    /// Known bound on the linearization norm, if any.
    virtual std::optional<double> norm_bound() const { return std::nullopt; }

    /// Solution-space pairing. L2 by default; the Schlieren family pairs
    /// through (I - Laplace), matching its smoothed adjoint.
    virtual double x_inner(const GridFunction& a, const GridFunction& b) const;
    double x_norm(const GridFunction& a) const;

    DataVector make_data(std::vector<double> values) const;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Mean of f over circles of radius r_k centered at a detection point:
/// entry k approximates (1/2pi) * integral of f(center + r_k * sigma) over
/// the unit circle, by an n_angles-point periodic trapezoid rule with
/// bilinear interpolation (zero outside the grid). Data weights r_k*dr
/// realize L2([0,2R], r dr).
class CircularMeanOp final : public ForwardOperator {
public:
    /// Midpoint radii r_k = (k+1/2)*dr, dr = 2R/n_radii.
    /// n_angles <= 0 selects the default 4*max(nx,ny).
    CircularMeanOp(const GridSpec& grid, Vec2 center, int n_radii, double R, int n_angles = 0);
    /// Explicit radii with uniform spacing dr for the data weights.
    CircularMeanOp(const GridSpec& grid, Vec2 center, std::vector<double> radii, double dr,
                   int n_angles);

    DataVector apply(const GridFunction& f) const override;
    DataVector deriv(const GridFunction& f, const GridFunction& h) const override;
    GridFunction deriv_adjoint(const GridFunction& f, const DataVector& w) const override;
    const std::vector<double>& data_weights() const override { return weights_; }
    std::optional<double> norm_bound() const override;

    const std::vector<double>& radii() const { return radii_; }
    Vec2 center() const { return center_; }

private:
    GridSpec grid_;
    Vec2 center_;
    std::vector<double> radii_;
    std::vector<double> weights_;
    int n_angles_;
};

/// Line integrals R_i f(s) = integral of f(s*sigma + t*sigma_perp) dt for
/// midpoint offsets s over [-s_max, s_max], sampled with step min(hx,hy)/2
/// and bilinear interpolation. Data weights are the offset spacing ds.
class RadonOp final : public ForwardOperator {
public:
    RadonOp(const GridSpec& grid, double angle, int n_offsets, double s_max = 1.4142135623730951);

    DataVector apply(const GridFunction& f) const override;
    DataVector deriv(const GridFunction& f, const GridFunction& h) const override;
    GridFunction deriv_adjoint(const GridFunction& f, const DataVector& w) const override;
    const std::vector<double>& data_weights() const override { return weights_; }

    const std::vector<double>& offsets() const { return s_; }
    double angle() const { return angle_; }

private:
    friend class SchlierenOp;
    GridSpec grid_;
    double angle_;
    Vec2 sigma_;
    std::vector<double> s_;
    std::vector<double> weights_;
    double dt_;
    int n_t_;
    double t0_;
};

/// F_i(f) = (R_i f)^2 with derivative F'(f)h = 2*R_i f * R_i h and the
/// smoothed adjoint F'(f)* w = (I-Laplace)^{-1} Rt(2*w*R_i f), where Rt is
/// the weighted transpose of the discrete line-integral map. The pairing
/// that makes this an exact adjoint is <a,b> = <a, (I-Laplace) b>_L2, which
/// x_inner implements.
class SchlierenOp final : public ForwardOperator {
public:
    SchlierenOp(const GridSpec& grid, double angle, int n_offsets, double s_max = 1.4142135623730951,
                double eta = 0.2, double solve_rtol = 1e-12, int solve_max_iters = 20000);

    DataVector apply(const GridFunction& f) const override;
    DataVector deriv(const GridFunction& f, const GridFunction& h) const override;
    GridFunction deriv_adjoint(const GridFunction& f, const DataVector& w) const override;
    const std::vector<double>& data_weights() const override { return radon_.data_weights(); }
    double eta_bound() const override { return eta_; }
    double x_inner(const GridFunction& a, const GridFunction& b) const override;

    const RadonOp& radon() const { return radon_; }

private:
    RadonOp radon_;
    double eta_;
    double solve_rtol_;
    int solve_max_iters_;
};

/// Parameter-to-state map F(c) = u(c) for -Laplace(u) + c*u = f with
/// u = g on the boundary; Y = L2(Omega) with cell-area weights.
/// F'(c)h = -A(c)^{-1}(h*u(c)) and F'(c)*w = -u(c)*A(c)^{-1}w, both exact
/// transposes up to the inner solver tolerance since A(c) is symmetric.
class EllipticParamOp final : public ForwardOperator {
public:
    EllipticParamOp(const GridSpec& grid, GridFunction f, std::function<double(double, double)> g,
                    double eta = 0.2, double solve_rtol = 1e-12, int solve_max_iters = 20000);

    DataVector apply(const GridFunction& c) const override;
    DataVector deriv(const GridFunction& c, const GridFunction& h) const override;
    GridFunction deriv_adjoint(const GridFunction& c, const DataVector& w) const override;
    const std::vector<double>& data_weights() const override { return weights_; }
    double eta_bound() const override { return eta_; }

    /// u(c), cached for the most recent coefficient.
    GridFunction state(const GridFunction& c) const;

private:
    GridFunction solve_at(const GridFunction& c, const GridFunction& rhs) const;

    GridSpec grid_;
    GridFunction f_;
    std::function<double(double, double)> g_;
    double eta_;
    double rtol_;
    int max_iters_;
    std::vector<double> weights_;
    mutable std::mutex cache_mutex_;
    mutable std::shared_ptr<const std::pair<std::vector<double>, GridFunction>> state_cache_;
};

/// Largest singular value of the linearization at x0: power iteration on
/// F'(x0)* F'(x0) in the declared inner products, deterministic in the seed.
double operator_norm_estimate(const ForwardOperator& op, const GridFunction& x0, int iters,
                              std::uint64_t seed);

} // namespace lwk
