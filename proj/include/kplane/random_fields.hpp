#pragma once

#include <cstdint>
#include <memory>

#include "kplane/fields.hpp"

namespace kplane {

// Seeded smooth test fields.
//
// random_smooth_field: sum of `modes` plane waves cos(2 pi xi.x + phase) with
// standard normal amplitudes and |xi| <= band (cycles per unit length),
// multiplied by exp(-|x - c|^2 / (2 width^2)). Signed.
//
// random_bump_field: sum of `bumps` Gaussian bumps with uniform weights in
// [0.2, 1], widths in [0.4, 1.5] and centres in the ball of radius L/3.
// Nonnegative.
struct RandomFieldOptions {
    double band = 0.5;
    double width = 0.0;  // 0 means L/6
    int modes = 12;
    int bumps = 3;
};

GridField random_smooth_field(const GridSpec& spec, std::uint64_t seed, const RandomFieldOptions& opt = {});
GridField random_bump_field(const GridSpec& spec, std::uint64_t seed, const RandomFieldOptions& opt = {});

// Signed smooth plane field: y-profile as in random_smooth_field and a smooth,
// antipodally even modulation in theta.
PlaneField random_plane_field(std::shared_ptr<const GrassmannianQuadrature> quad, int N, double L,
                              std::uint64_t seed, const RandomFieldOptions& opt = {});

}  // namespace kplane
