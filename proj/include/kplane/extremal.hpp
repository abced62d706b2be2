#pragma once

#include <vector>

#include "kplane/euler_lagrange.hpp"
#include "kplane/exponents.hpp"
#include "kplane/fields.hpp"
#include "kplane/transform.hpp"

namespace kplane {

// ||Tf||_{q0} / ||f||_{p0}
double phi(const GridField& f, QuadPtr quad, const Exponents& e);

// Sorts |f| descending onto nodes ordered by distance from the origin
// (ties in row-major node order). Throws DomainError for negative input.
GridField rearrange(const GridField& f);

struct RearrangementReport {
    double norm_preservation_error = 0;  // | ||f*||_p - ||f||_p | / ||f||_p
    double transform_gain = 0;           // ||T f*||_q - ||T f||_q
    double transform_norm = 0;           // ||T f||_q, for relative tolerances
};

// Needs integer q0 (GateError otherwise) and f >= 0.
RearrangementReport rearrangement_gain(const GridField& f, QuadPtr quad, const Exponents& e);

// How the level t* is picked from J(t) = t^p0 mu{f > t}.
//   argmax_grid: argmax of J over 64 log-spaced levels in [1e-3, 1] max f.
//   upper_level: the largest t with J(t) >= J_sup / 2, solved exactly
//                between consecutive sample values (J_sup = sup of J).
enum class DilationRule { argmax_grid, upper_level };

struct DilationResult {
    double sigma = 1;
    double t_star = 0;
    double objective = 0;  // J(t*)
    double ball_radius = 0;  // radius of the centred ball where f_normalized >= level
    GridField f_normalized;
};

// sigma = (level / t*)^{p0/n}; f_normalized(x) = sigma^{n/p0} f(sigma x),
// so the level t* of f becomes `level` in f_normalized.
DilationResult dilation_normalize(const GridField& f, const Exponents& e,
                                  DilationRule rule = DilationRule::upper_level, double level = 1.0);

// Level t* alone (same rules), plus J(t*).
std::pair<double, double> dilation_level(const GridField& f, const Exponents& e, DilationRule rule);

// Radius of the largest centred ball on which f >= level (grid estimate).
double ball_radius(const GridField& f, double level);

struct SequenceRecord {
    int iter = 0;
    double phi = 0;
    double sigma = 1;
    double step_distance = 0;
    double ball_radius = 0;
};

struct SequenceResult {
    GridField f;
    std::vector<SequenceRecord> trajectory;
    double max_phi = 0;
    int phi_drops = 0;  // steps where phi fell by more than the slack
};

struct SequenceOptions {
    double damping = 0.5;
    double level = 1.0;
    double slack = 1e-3;
    DilationRule rule = DilationRule::upper_level;
};

// rearrange -> dilation_normalize -> damped Picard step -> p0 normalization.
// Throws DriverError if phi drops by more than 10x the slack in one step.
SequenceResult extremize_sequence(const GridField& f0, QuadPtr quad, const Exponents& e, int iters,
                                  const SequenceOptions& opt = {});

// (1 + |x|^2)^{-(n-k)/(2(p0-1))}
GridField extremizer(const GridSpec& spec, const Exponents& e);

}  // namespace kplane
