#pragma once

#include <cstdint>
#include <vector>

#include "kplane/exponents.hpp"
#include "kplane/fields.hpp"
#include "kplane/transform.hpp"

namespace kplane {

// ||Tf||_{q0} / ||f||_{p0}; throws DomainError for f = 0.
double functional_phi(const GridField& f, const PlaneField& tf, const Exponents& e);
double functional_phi(const GridField& f, QuadPtr quad, const Exponents& e);

// (T*((Tf)^qel))^pel with pointwise integer powers. Needs integer_case.
GridField script_S(const GridField& f, QuadPtr quad, const Exponents& e);

// (||f||_p^p ||Tf||_q^{-q})^pel with p = p0, q = q0.
double lambda_of(const GridField& f, QuadPtr quad, const Exponents& e);
double lambda_of(const GridField& f, const PlaneField& tf, const Exponents& e);

// ||f - lambda S f||_{p0} / ||f||_{p0}.
double el_residual(const GridField& f, QuadPtr quad, const Exponents& e);
// Same quantity from precomputed lambda and S f.
double el_residual(const GridField& f, const GridField& sf, double lambda, const Exponents& e);

struct ELState {
    GridField f;
    double lambda = 0;
    double phi = 0;
    double residual = 0;
};

struct PicardRecord {
    int iter = 0;
    double phi = 0;
    double residual = 0;
    double step_distance = 0;  // ||f_m - f_{m-1}||_{p0}, 0 for m = 0
    double lambda = 0;
};

struct PicardResult {
    ELState final_state;
    std::vector<PicardRecord> trajectory;  // one record per iterate f_0 .. f_iters
};

// f_{m+1} = normalize((1-damping) f_m + damping S f_m / ||S f_m||), the
// normalization putting every iterate on the unit p0-sphere.
PicardResult picard_solve(const GridField& f0, QuadPtr quad, const Exponents& e, int iters,
                          double damping = 0.5);

// One damped step from f (assumed p0-normalized); used by the extremizing
// sequence driver.
GridField picard_step(const GridField& f, QuadPtr quad, const Exponents& e, double damping = 0.5);

// prod_i T*( prod_j T f_{ij} ), fvec indexed [pel][qel].
using FieldMatrix = std::vector<std::vector<GridField>>;
GridField multilinear_S(const FieldMatrix& fvec, QuadPtr quad, const Exponents& e);

struct HolderGap {
    double gap = 0;    // max over nodes of |S(fvec)| - prod S(|f_ij|)^{1/(pel qel)}
    double scale = 0;  // max over nodes of the right-hand side
};
HolderGap holder_domination_gap(const FieldMatrix& fvec, QuadPtr quad, const Exponents& e);

struct EpsilonSplit {
    GridField phi_eps;
    GridField g_eps;
    double eps = 0;
    double M = 0;
    double R = 0;
    double g_norm = 0;  // ||g_eps||_{X_0}
};

// phi = sign(f) min(|f|, M) on |x| <= R and 0 elsewhere, g = f - phi, with
// (R, M) the first dyadic pair (R ascending up to the box diagonal, then M
// ascending) giving
// ||g||_{X_0} < eps.
EpsilonSplit epsilon_split(const GridField& f, double eps, const Exponents& e);

struct ContractionProbe {
    double ratio = 0;  // max Lipschitz ratio over the sampled pairs
    double lambda = 0;
    double radius = 0;
    int pairs = 0;
};

// Lipschitz ratio of A(h) = lambda S h + (g - lambda S g) on the X_t ball of
// radius eps^{1/2}; lambda is that of f = phi_eps + g_eps. Pairs are seeded
// smooth random fields, so different eps reuse the same shapes.
ContractionProbe contraction_probe(const EpsilonSplit& split, const Rational& t, int pairs, QuadPtr quad,
                                   const Exponents& e, std::uint64_t seed = 1);

}  // namespace kplane
