#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lwk/grid.hpp"

namespace lwk {

class ForwardOperator;

enum class ShapeKind { Disc, Ellipse, Rect };

/// One piecewise-constant primitive. Disc uses rx as the radius; Ellipse is
/// axis-aligned with semi-axes (rx, ry); Rect has half-widths (rx, ry).
struct Primitive {
    ShapeKind shape = ShapeKind::Disc;
    double cx = 0.0;
    double cy = 0.0;
    double rx = 0.0;
    double ry = 0.0;
    double value = 0.0;
};

/// Sum of primitive indicator functions, evaluated at cell centers.
/// Overlapping primitives add.
struct Phantom {
    std::vector<Primitive> primitives;
};

double evaluate(const Phantom& phantom, double x, double y);
GridFunction rasterize(const Phantom& phantom, const GridSpec& spec);

/// Coefficient target on [0,1]^2: a disc of value 1 at (0.65, 0.36) with
/// radius 0.18 and an ellipse of value 0.5 at (0.35, 0.75) with semi-axes
/// (0.2, 0.1). The two supports are disjoint.
Phantom pde_coefficient_phantom();

/// Fixed piecewise-constant arrangement used by the tomography-style runs:
/// two discs and a rectangle with values in [0, 1], supported well inside
/// the unit disc.
Phantom imaging_phantom();

std::vector<DataVector> synthesize(
    const std::vector<std::shared_ptr<const ForwardOperator>>& operators,
    const GridFunction& x_true);

enum class NoiseMode { AbsoluteDelta, RelativePercent };

struct NoiseSpec {
    NoiseMode mode = NoiseMode::AbsoluteDelta;
    double amount = 0.0;  // delta, or the percentage for RelativePercent
    std::uint64_t seed = 0;

    void validate() const;
};

/// Perturbs y with pointwise uniform [-1,1] noise rescaled so the weighted
/// data norm of the perturbation is exactly the target (delta, or
/// amount% of ||y||). Returns the perturbed data and the achieved delta.
/// A zero-norm draw (possible only for degenerate sizes) redraws with
/// seed+1.
std::pair<DataVector, double> add_noise(const DataVector& y, const NoiseSpec& spec);

/// Stable sub-seed for measurement i, so per-operator noise draws are
/// independent and insensitive to the operator count.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t i);

} // namespace lwk
