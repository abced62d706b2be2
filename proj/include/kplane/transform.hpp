#pragma once

#include <functional>
#include <memory>

#include "kplane/fields.hpp"
#include "kplane/geometry.hpp"

namespace kplane {

using QuadPtr = std::shared_ptr<const GrassmannianQuadrature>;

// Composite trapezoid along each plane with step h over the interpolated
// field; the plane parameters run over |t_b| <= L sqrt(n) so that every plane
// crosses the whole box.
PlaneField forward(const GridField& f, QuadPtr quad);

// Quadrature-weighted average over directions of g(theta, P(x, theta_perp)).
GridField adjoint(const PlaneField& g, const GridSpec& spec);

// |<Tf, g> - <f, T*g>| / (|<Tf, g>| + machine epsilon)
double duality_gap(const GridField& f, const PlaneField& g);

// Analytic remainder of a closed-form line integral outside the box: for each
// sample (theta, y) the integral of expr along the line over the parameter
// range where the line has left [-L, L)^n. Only k = 1 is supported.
PlaneField forward_tail(const std::function<double(const Vec3&)>& expr, QuadPtr quad, int N, double L);

struct SliceDiagnostic {
    double ratio_mean = 0;
    double ratio_rel_spread = 0;
    int samples = 0;
};

// Compares the (n-k)-dimensional DFT of forward(f) along y with the Fourier
// transform of f restricted to theta_perp. Both sides are direct quadratures.
SliceDiagnostic slice_diagnostic(const GridField& f, QuadPtr quad, double floor_rel = 1e-4);

// For n=2, k=1: |xi| * FT(T*g)(xi) against C * ghat(theta(xi), xi) along 12
// rays, C fitted by least squares; error is the amplitude-weighted relative
// deviation over the band. Returns zeros for g = 0.
struct AdjointSliceResult {
    double error = 0;
    double constant = 0;
    int samples = 0;
};
AdjointSliceResult adjoint_slice_check(const PlaneField& g, double floor_rel = 1e-6);

}  // namespace kplane
