#include "lwk/phantoms.hpp"

#include <cmath>
#include <memory>

#include "lwk/errors.hpp"
#include "lwk/operators.hpp"

namespace lwk {

namespace {

bool contains(const Primitive& p, double x, double y) {
    const double dx = x - p.cx;
    const double dy = y - p.cy;
    switch (p.shape) {
    case ShapeKind::Disc:
        return dx * dx + dy * dy <= p.rx * p.rx;
    case ShapeKind::Ellipse: {
        if (p.rx <= 0.0 || p.ry <= 0.0)
            return false;
        const double a = dx / p.rx;
        const double b = dy / p.ry;
        return a * a + b * b <= 1.0;
    }
    case ShapeKind::Rect:
        return std::abs(dx) <= p.rx && std::abs(dy) <= p.ry;
    }
    return false;
}

// splitmix64; decorrelates consecutive seeds and (seed, index) pairs.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Uniform double in [-1, 1] from the top 53 bits; avoids distribution
// objects so streams are identical across standard library versions.
double uniform_pm1(std::uint64_t& state) {
    state = mix64(state);
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;  // [0,1)
    return 2.0 * u - 1.0;
}

} // namespace

double evaluate(const Phantom& phantom, double x, double y) {
    double v = 0.0;
    for (const Primitive& p : phantom.primitives)
        if (contains(p, x, y))
            v += p.value;
    return v;
}

GridFunction rasterize(const Phantom& phantom, const GridSpec& spec) {
    GridFunction f = GridFunction::zeros(spec);
    for (int j = 0; j < spec.ny; ++j) {
        const double y = spec.y_center(j);
        for (int i = 0; i < spec.nx; ++i)
            f.at(i, j) = evaluate(phantom, spec.x_center(i), y);
    }
    return f;
}

Phantom pde_coefficient_phantom() {
    Phantom ph;
    ph.primitives.push_back({ShapeKind::Disc, 0.65, 0.36, 0.18, 0.0, 1.0});
    ph.primitives.push_back({ShapeKind::Ellipse, 0.35, 0.75, 0.2, 0.1, 0.5});
    return ph;
}

Phantom imaging_phantom() {
    Phantom ph;
    ph.primitives.push_back({ShapeKind::Disc, 0.0, 0.35, 0.25, 0.0, 1.0});
    ph.primitives.push_back({ShapeKind::Disc, -0.4, -0.25, 0.2, 0.0, 0.6});
    ph.primitives.push_back({ShapeKind::Rect, 0.35, -0.3, 0.2, 0.15, 0.8});
    return ph;
}

std::vector<DataVector> synthesize(
    const std::vector<std::shared_ptr<const ForwardOperator>>& operators,
    const GridFunction& x_true) {
    std::vector<DataVector> out;
    out.reserve(operators.size());
    for (const auto& op : operators) {
        if (!op)
            throw ParameterError("synthesize: null operator");
        out.push_back(op->apply(x_true));
    }
    return out;
}

void NoiseSpec::validate() const {
    if (amount < 0.0)
        throw ParameterError("NoiseSpec: amount >= 0 required");
}

std::pair<DataVector, double> add_noise(const DataVector& y, const NoiseSpec& spec) {
    spec.validate();
    const double target =
        spec.mode == NoiseMode::AbsoluteDelta ? spec.amount : spec.amount / 100.0 * data_norm(y);
    if (target == 0.0)
        return {y, 0.0};

    DataVector noise = y;
    std::uint64_t seed = spec.seed;
    double norm = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::uint64_t state = mix64(seed);
        for (auto& v : noise.values) v = uniform_pm1(state);
        norm = data_norm(noise);
        if (norm > 0.0)
            break;
        ++seed;  // essentially unreachable; kept for determinism of the retry
    }
    if (norm == 0.0)
        throw SolverError("add_noise: could not draw a nonzero perturbation");

    const double scale = target / norm;
    DataVector out = y;
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] += scale * noise.values[k];

    for (std::size_t k = 0; k < noise.values.size(); ++k)
        noise.values[k] *= scale;
    return {out, data_norm(noise)};
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t i) {
    return mix64(mix64(seed) ^ (i + 1));
}

} // namespace lwk
