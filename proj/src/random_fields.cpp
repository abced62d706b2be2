#include "kplane/random_fields.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace kplane {

namespace {

struct Wave {
    Vec3 xi{0, 0, 0};
    double amp = 0;
    double phase = 0;
};

std::vector<Wave> draw_waves(std::mt19937_64& rng, int dim, const RandomFieldOptions& opt) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit;
    std::vector<Wave> waves(opt.modes);
    for (auto& w : waves) {
        // uniform in the ball |xi| <= band by rejection
        do {
            for (int d = 0; d < dim; ++d) w.xi[d] = opt.band * (2 * unit(rng) - 1);
        } while (w.xi[0] * w.xi[0] + w.xi[1] * w.xi[1] + w.xi[2] * w.xi[2] > opt.band * opt.band);
        w.amp = gauss(rng);
        w.phase = 2 * std::numbers::pi * unit(rng);
    }
    return waves;
}

double wave_sum(const std::vector<Wave>& waves, const double* x, int dim) {
    double s = 0;
    for (const auto& w : waves) {
        double arg = w.phase;
        for (int d = 0; d < dim; ++d) arg += 2 * std::numbers::pi * w.xi[d] * x[d];
        s += w.amp * std::cos(arg);
    }
    return s;
}

}  // namespace

GridField random_smooth_field(const GridSpec& spec, std::uint64_t seed, const RandomFieldOptions& opt) {
    std::mt19937_64 rng(seed);
    const double width = opt.width > 0 ? opt.width : spec.L / 6;
    auto waves = draw_waves(rng, spec.dim, opt);
    std::uniform_real_distribution<double> shift(-spec.L / 8, spec.L / 8);
    Vec3 c{0, 0, 0};
    for (int d = 0; d < spec.dim; ++d) c[d] = shift(rng);
    return sample(
        [&](const Vec3& x) {
            double r2 = 0;
            for (int d = 0; d < spec.dim; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
            return wave_sum(waves, x.data(), spec.dim) * std::exp(-r2 / (2 * width * width));
        },
        spec);
}

GridField random_bump_field(const GridSpec& spec, std::uint64_t seed, const RandomFieldOptions& opt) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit;
    struct Bump {
        Vec3 c{0, 0, 0};
        double weight, width;
    };
    std::vector<Bump> bumps(opt.bumps);
    for (auto& b : bumps) {
        b.weight = 0.2 + 0.8 * unit(rng);
        b.width = 0.4 + 1.1 * unit(rng);
        double r2;
        do {
            r2 = 0;
            for (int d = 0; d < spec.dim; ++d) {
                b.c[d] = spec.L / 3 * (2 * unit(rng) - 1);
                r2 += b.c[d] * b.c[d];
            }
        } while (r2 > spec.L * spec.L / 9);
    }
    return sample(
        [&](const Vec3& x) {
            double s = 0;
            for (const auto& b : bumps) {
                double r2 = 0;
                for (int d = 0; d < spec.dim; ++d) r2 += (x[d] - b.c[d]) * (x[d] - b.c[d]);
                s += b.weight * std::exp(-r2 / (2 * b.width * b.width));
            }
            return s;
        },
        spec);
}

PlaneField random_plane_field(std::shared_ptr<const GrassmannianQuadrature> quad, int N, double L,
                              std::uint64_t seed, const RandomFieldOptions& opt) {
    std::mt19937_64 rng(seed);
    const int dim = quad->n - quad->k;
    const double width = opt.width > 0 ? opt.width : L / 6;
    auto waves = draw_waves(rng, dim, opt);
    std::normal_distribution<double> gauss;
    Vec3 axis{gauss(rng), gauss(rng), quad->n == 3 ? gauss(rng) : 0.0};
    double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    for (double& a : axis) a /= norm;
    const double depth = 0.5 * std::uniform_real_distribution<double>(0.2, 1.0)(rng);

    return sample_plane(
        [&](std::size_t dir, const std::vector<double>& y) {
            const auto& dd = quad->directions[dir];
            const auto& f = dd.k == 1 ? dd.frame[0] : dd.coframe[0];
            double c = f[0] * axis[0] + f[1] * axis[1] + f[2] * axis[2];
            double r2 = 0;
            for (double v : y) r2 += v * v;
            return (1 + depth * c * c) * wave_sum(waves, y.data(), dim) * std::exp(-r2 / (2 * width * width));
        },
        quad, N, L);
}

}  // namespace kplane
