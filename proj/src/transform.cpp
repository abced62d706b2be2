#include "kplane/transform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "kplane/errors.hpp"
#include "kplane/spectral.hpp"

namespace kplane {

namespace {

using cplx = std::complex<double>;

// Range of integer j for which base + j*step stays inside [0, N) on every
// axis, widened by one so rounding never drops a contributing sample.
std::pair<int, int> clip_line(const double* base, const double* step, int dim, int N, int half) {
    double lo = -half, hi = half;
    for (int a = 0; a < dim; ++a) {
        if (std::fabs(step[a]) < 1e-15) {
            if (base[a] < 0 || base[a] >= N) return {1, 0};
            continue;
        }
        double t0 = (0 - base[a]) / step[a];
        double t1 = (N - base[a]) / step[a];
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
    }
    if (lo > hi) return {1, 0};
    return {std::max(-half, static_cast<int>(std::floor(lo)) - 1), std::min(half, static_cast<int>(std::ceil(hi)) + 1)};
}

double line_sum(const GridField& f, const double* base, const double* step, int half) {
    const int N = f.spec.N;
    const int dim = f.spec.dim;
    auto [j0, j1] = clip_line(base, step, dim, N, half);
    const double* v = f.values.data();
    double s = 0;
    if (dim == 2) {
        for (int j = j0; j <= j1; ++j) s += detail::lerp_2d(v, N, base[0] + j * step[0], base[1] + j * step[1]);
    } else {
        for (int j = j0; j <= j1; ++j)
            s += detail::lerp_3d(v, N, base[0] + j * step[0], base[1] + j * step[1], base[2] + j * step[2]);
    }
    return s;
}

}  // namespace

PlaneField forward(const GridField& f, QuadPtr quad) {
    const auto& spec = f.spec;
    if (spec.dim != quad->n)
        throw ShapeError("field dimension " + std::to_string(spec.dim) + " does not match quadrature n=" +
                         std::to_string(quad->n));
    PlaneField out(quad, spec.N, spec.L);
    const double h = spec.h();
    const int n = quad->n;
    const int k = quad->k;
    const int half = static_cast<int>(std::ceil(spec.L * std::sqrt(static_cast<double>(n)) / h));
    const double shift = spec.L / h;  // physical 0 sits at fractional index L/h
    const double scale = std::pow(h, k);
    const auto D = static_cast<long>(quad->size());

#pragma omp parallel for schedule(static)
    for (long d = 0; d < D; ++d) {
        const Direction& dir = quad->directions[d];
        double* row = out.row(d);
        // in index units: a physical displacement of h along a frame vector
        // moves the fractional index by the frame vector itself
        for (std::size_t idx = 0; idx < out.per_direction(); ++idx) {
            std::vector<double> y = out.offset(idx);
            double base[3] = {shift, shift, shift};
            for (std::size_t a = 0; a < y.size(); ++a)
                for (int c = 0; c < n; ++c) base[c] += y[a] / h * dir.coframe[a][c];
            double s = 0;
            if (k == 1) {
                s = line_sum(f, base, dir.frame[0].data(), half);
            } else {
                const double* step = dir.frame[1].data();
                for (int i = -half; i <= half; ++i) {
                    double b[3];
                    for (int c = 0; c < 3; ++c) b[c] = base[c] + i * dir.frame[0][c];
                    s += line_sum(f, b, step, half);
                }
            }
            row[idx] = scale * s;
        }
    }
    return out;
}

GridField adjoint(const PlaneField& g, const GridSpec& spec) {
    spec.validate();
    const auto& quad = *g.quad;
    if (spec.dim != quad.n) throw ShapeError("grid dimension does not match quadrature");
    GridField out(spec);
    const double inv_h = 1.0 / g.offsets.h();
    const double Lg = g.offsets.L;
    const int Ng = g.offsets.N;
    const long rows = spec.N;
    const std::size_t per_row = spec.size() / spec.N;

#pragma omp parallel for schedule(static)
    for (long r = 0; r < rows; ++r) {
        double* dst = out.values.data() + r * per_row;
        for (std::size_t i = 0; i < per_row; ++i) {
            const Vec3 x = out.node(r * per_row + i);
            double acc = 0;
            for (std::size_t d = 0; d < quad.size(); ++d) {
                const Direction& dir = quad.directions[d];
                const double* gv = g.row(d);
                if (dir.coframe.size() == 1) {
                    const auto& c = dir.coframe[0];
                    double y = x[0] * c[0] + x[1] * c[1] + x[2] * c[2];
                    acc += quad.weights[d] * detail::lerp_1d(gv, Ng, (y + Lg) * inv_h);
                } else {
                    const auto& a = dir.coframe[0];
                    const auto& b = dir.coframe[1];
                    double y0 = x[0] * a[0] + x[1] * a[1] + x[2] * a[2];
                    double y1 = x[0] * b[0] + x[1] * b[1] + x[2] * b[2];
                    acc += quad.weights[d] * detail::lerp_2d(gv, Ng, (y0 + Lg) * inv_h, (y1 + Lg) * inv_h);
                }
            }
            dst[i] = acc;
        }
    }
    return out;
}

double duality_gap(const GridField& f, const PlaneField& g) {
    PlaneField tf = forward(f, g.quad);
    GridField tsg = adjoint(g, f.spec);
    double lhs = inner_product(tf, g);
    double rhs = inner_product(f, tsg);
    return std::fabs(lhs - rhs) / (std::fabs(lhs) + std::numeric_limits<double>::epsilon());
}

PlaneField forward_tail(const std::function<double(const Vec3&)>& expr, QuadPtr quad, int N, double L) {
    if (quad->k != 1) throw UnsupportedGeometry("forward_tail supports k = 1 only");
    PlaneField out(quad, N, L);
    const int n = quad->n;
    boost::math::quadrature::exp_sinh<double> integrator;
    for (std::size_t d = 0; d < quad->size(); ++d) {
        const Direction& dir = quad->directions[d];
        const Vec3& e = dir.frame[0];
        for (std::size_t idx = 0; idx < out.per_direction(); ++idx) {
            std::vector<double> y = out.offset(idx);
            Vec3 base{0, 0, 0};
            for (std::size_t a = 0; a < y.size(); ++a)
                for (int c = 0; c < n; ++c) base[c] += y[a] * dir.coframe[a][c];
            // chord of the line inside the closed box
            double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
            for (int c = 0; c < n; ++c) {
                if (std::fabs(e[c]) < 1e-15) continue;
                double t0 = (-L - base[c]) / e[c], t1 = (L - base[c]) / e[c];
                if (t0 > t1) std::swap(t0, t1);
                lo = std::max(lo, t0);
                hi = std::min(hi, t1);
            }
            auto along = [&](double t) {
                Vec3 p = base;
                for (int c = 0; c < n; ++c) p[c] += t * e[c];
                return expr(p);
            };
            double tail = 0;
            if (lo > hi) {
                lo = hi = 0;  // the line misses the box
            }
            tail += integrator.integrate([&](double s) { return along(hi + s); });
            tail += integrator.integrate([&](double s) { return along(lo - s); });
            out.row(d)[idx] = tail;
        }
    }
    return out;
}

SliceDiagnostic slice_diagnostic(const GridField& f, QuadPtr quad, double floor_rel) {
    const auto& spec = f.spec;
    const int n = spec.dim;
    const int m = n - quad->k;
    const int N = spec.N;
    const double h = spec.h();
    const double dxi = 1.0 / (N * h);
    PlaneField tf = forward(f, quad);

    // sample at most 16 directions and a lattice of offset frequencies
    std::vector<std::size_t> dirs;
    const std::size_t stride_d = std::max<std::size_t>(1, quad->size() / 16);
    for (std::size_t d = 0; d < quad->size(); d += stride_d) dirs.push_back(d);
    std::vector<std::vector<int>> freqs;
    if (m == 1) {
        for (int a = -N / 2; a < N / 2; ++a) freqs.push_back({a});
    } else {
        const int stride = std::max(1, N / 16);
        for (int a = -N / 2; a < N / 2; a += stride)
            for (int b = -N / 2; b < N / 2; b += stride) freqs.push_back({a, b});
    }

    // separable direct Fourier transform of f at an arbitrary frequency
    std::vector<double> coords(N);
    for (int i = 0; i < N; ++i) coords[i] = spec.coord(i);
    auto fhat = [&](const Vec3& xi) {
        std::vector<std::vector<cplx>> phase(n, std::vector<cplx>(N));
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < N; ++i) phase[a][i] = std::polar(1.0, -2 * std::numbers::pi * coords[i] * xi[a]);
        cplx total = 0;
        const std::size_t inner = spec.size() / N;
        for (int i = 0; i < N; ++i) {
            cplx acc = 0;
            const double* v = f.values.data() + i * inner;
            if (n == 2) {
                for (int j = 0; j < N; ++j) acc += v[j] * phase[1][j];
            } else {
                for (int j = 0; j < N; ++j) {
                    cplx acc2 = 0;
                    for (int l = 0; l < N; ++l) acc2 += v[j * N + l] * phase[2][l];
                    acc += acc2 * phase[1][j];
                }
            }
            total += acc * phase[0][i];
        }
        return total * spec.cell_volume();
    };
    auto tfhat = [&](std::size_t d, const std::vector<double>& eta) {
        cplx total = 0;
        for (std::size_t idx = 0; idx < tf.per_direction(); ++idx) {
            std::vector<double> y = tf.offset(idx);
            double arg = 0;
            for (int a = 0; a < m; ++a) arg += y[a] * eta[a];
            total += tf.row(d)[idx] * std::polar(1.0, -2 * std::numbers::pi * arg);
        }
        return total * tf.offsets.cell_volume();
    };

    struct Pair {
        cplx lhs, rhs;
    };
    std::vector<Pair> pairs;
    double fmax = 0;
    for (std::size_t d : dirs) {
        const Direction& dir = quad->directions[d];
        for (const auto& fr : freqs) {
            std::vector<double> eta(m);
            Vec3 xi{0, 0, 0};
            for (int a = 0; a < m; ++a) {
                eta[a] = fr[a] * dxi;
                for (int c = 0; c < n; ++c) xi[c] += eta[a] * dir.coframe[a][c];
            }
            cplx fh = fhat(xi);
            fmax = std::max(fmax, std::abs(fh));
            pairs.push_back({tfhat(d, eta), fh});
        }
    }
    std::vector<cplx> ratios;
    for (const auto& p : pairs)
        if (fmax > 0 && std::abs(p.rhs) >= floor_rel * fmax) ratios.push_back(p.lhs / p.rhs);
    if (ratios.empty()) throw DiagnosticError("no frequency above the floor; field is zero or unresolved");

    cplx mean = 0;
    for (auto r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0;
    for (auto r : ratios) var += std::norm(r - mean);
    var /= static_cast<double>(ratios.size());
    return SliceDiagnostic{mean.real(), std::sqrt(var) / std::abs(mean), static_cast<int>(ratios.size())};
}

AdjointSliceResult adjoint_slice_check(const PlaneField& g, double floor_rel) {
    const auto& quad = *g.quad;
    if (quad.n != 2 || quad.k != 1)
        throw UnsupportedGeometry("adjoint_slice_check needs n=2, k=1 where theta is fixed by xi");
    const int N = g.offsets.N;
    const double L = g.offsets.L;
    const double h = g.offsets.h();
    const double dxi = 1.0 / (N * h);
    // T*g decays only like 1/|x|, so it is evaluated on a doubled box and
    // tapered there; the taper's spectral width sets the smoothing error
    const int grid_n = 2 * N;
    GridSpec spec{2, grid_n, 2 * L};
    GridField a = adjoint(g, spec);
    GridField win = edge_window(spec);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= win[i];

    auto ghat = [&](std::size_t d, double rho) {
        cplx s = 0;
        for (int i = 0; i < N; ++i) s += g.row(d)[i] * std::polar(1.0, -2 * std::numbers::pi * g.offsets.coord(i) * rho);
        return s * h;
    };
    double gmax = 0;
    for (std::size_t d = 0; d < quad.size(); d += std::max<std::size_t>(1, quad.size() / 16))
        for (int i = 0; i < N / 2; ++i) gmax = std::max(gmax, std::abs(ghat(d, i * dxi)));
    if (gmax == 0) return {};

    std::vector<double> coords(grid_n);
    for (int i = 0; i < grid_n; ++i) coords[i] = spec.coord(i);
    auto ahat = [&](double x0, double x1) {
        std::vector<cplx> p0(grid_n), p1(grid_n);
        for (int i = 0; i < grid_n; ++i) {
            p0[i] = std::polar(1.0, -2 * std::numbers::pi * coords[i] * x0);
            p1[i] = std::polar(1.0, -2 * std::numbers::pi * coords[i] * x1);
        }
        cplx total = 0;
        for (int i = 0; i < grid_n; ++i) {
            cplx acc = 0;
            for (int j = 0; j < grid_n; ++j) acc += a[i * grid_n + j] * p1[j];
            total += acc * p0[i];
        }
        return total * h * h;
    };

    // Rays at odd multiples of pi/24 avoid the spokes of equiangular sets
    // whose size is not a multiple of 3; each spoke is a line singularity of
    // the discrete transform. The innermost shells are skipped because the
    // window smooths the 1/|xi| singularity there.
    std::vector<cplx> lhs, rhs;
    const int rays = 12;
    for (int r = 0; r < rays; ++r) {
        const double ang = std::numbers::pi * (r + 0.5) / rays;
        const double c0 = std::cos(ang), c1 = std::sin(ang);
        std::size_t best = 0;
        double best_dot = -1;
        for (std::size_t d = 0; d < quad.size(); ++d) {
            const auto& c = quad.directions[d].coframe[0];
            double dd = std::fabs(c[0] * c0 + c[1] * c1);
            if (dd > best_dot) {
                best_dot = dd;
                best = d;
            }
        }
        const auto& c = quad.directions[best].coframe[0];
        for (int i = 4; i < N / 2; ++i) {
            const double rho = i * dxi;
            cplx gh = ghat(best, rho * (c0 * c[0] + c1 * c[1]));
            if (std::abs(gh) < floor_rel * gmax) continue;
            lhs.push_back(ahat(rho * c0, rho * c1) * std::pow(rho, quad.k));
            rhs.push_back(gh);
        }
    }
    if (lhs.empty()) return {};
    // least-squares constant, then amplitude-weighted relative error
    cplx num = 0;
    double den = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        num += lhs[i] * std::conj(rhs[i]);
        den += std::norm(rhs[i]);
    }
    const cplx C = num / den;
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        err += std::abs(lhs[i] - C * rhs[i]);
        scale += std::abs(C * rhs[i]);
    }
    return {err / scale, C.real(), static_cast<int>(lhs.size())};
}

}  // namespace kplane
