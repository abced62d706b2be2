#include "kplane/euler_lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kplane/errors.hpp"
#include "kplane/random_fields.hpp"
#include "kplane/spaces.hpp"

namespace kplane {

namespace {

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

void require_nonzero(const GridField& f, const char* what) {
    for (double v : f.values)
        if (v != 0) return;
    throw DomainError(std::string(what) + " of the zero field is undefined");
}

GridField scaled(const GridField& f, double c) {
    GridField out = f;
    for (double& v : out.values) v *= c;
    return out;
}

double distance_p(const GridField& a, const GridField& b, double p) {
    GridField d = a;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
    return lp_norm(d, p);
}

}  // namespace

double functional_phi(const GridField& f, const PlaneField& tf, const Exponents& e) {
    double nf = lp_norm(f, e.p0.to_double());
    if (nf == 0) throw DomainError("Phi of the zero field is undefined");
    return lp_norm(tf, e.q0.to_double()) / nf;
}

double functional_phi(const GridField& f, QuadPtr quad, const Exponents& e) {
    require_nonzero(f, "Phi");
    return functional_phi(f, forward(f, std::move(quad)), e);
}

GridField script_S(const GridField& f, QuadPtr quad, const Exponents& e) {
    const int qel = e.qel_int();
    const int pel = e.pel_int();
    PlaneField tf = forward(f, quad);
    for (double& v : tf.values) v = ipow(v, qel);
    GridField out = adjoint(tf, f.spec);
    for (double& v : out.values) v = ipow(v, pel);
    return out;
}

double lambda_of(const GridField& f, const PlaneField& tf, const Exponents& e) {
    const double p = e.p0.to_double();
    const double q = e.q0.to_double();
    double nf = lp_norm(f, p);
    double ntf = lp_norm(tf, q);
    if (nf == 0) throw DomainError("lambda of the zero field is undefined");
    if (ntf == 0) throw DomainError("lambda undefined: the transform of f vanishes");
    return std::pow(std::pow(nf, p) * std::pow(ntf, -q), e.pel.to_double());
}

double lambda_of(const GridField& f, QuadPtr quad, const Exponents& e) {
    require_nonzero(f, "lambda");
    return lambda_of(f, forward(f, std::move(quad)), e);
}

double el_residual(const GridField& f, const GridField& sf, double lambda, const Exponents& e) {
    const double p = e.p0.to_double();
    double nf = lp_norm(f, p);
    if (nf == 0) throw DomainError("residual of the zero field is undefined");
    return distance_p(f, scaled(sf, lambda), p) / nf;
}

double el_residual(const GridField& f, QuadPtr quad, const Exponents& e) {
    require_nonzero(f, "residual");
    double lambda = lambda_of(f, quad, e);
    return el_residual(f, script_S(f, quad, e), lambda, e);
}

GridField picard_step(const GridField& f, QuadPtr quad, const Exponents& e, double damping) {
    const double p = e.p0.to_double();
    GridField sf = script_S(f, quad, e);
    double ns = lp_norm(sf, p);
    if (!(ns > 0) || !std::isfinite(ns)) throw DivergenceError("S f collapsed to zero or overflowed");
    GridField next = f;
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = (1 - damping) * f[i] + damping * sf[i] / ns;
    double nn = lp_norm(next, p);
    if (!(nn > 0) || !std::isfinite(nn)) throw DivergenceError("Picard iterate collapsed to zero");
    for (double& v : next.values) v /= nn;
    return next;
}

PicardResult picard_solve(const GridField& f0, QuadPtr quad, const Exponents& e, int iters, double damping) {
    if (!(damping > 0 && damping <= 1)) throw DomainError("damping must lie in (0, 1]");
    for (double v : f0.values)
        if (v < 0) throw DomainError("Picard start must be nonnegative");
    require_nonzero(f0, "Picard start");
    const double p = e.p0.to_double();

    PicardResult res;
    GridField f = scaled(f0, 1.0 / lp_norm(f0, p));
    GridField prev;
    for (int m = 0; m <= iters; ++m) {
        PlaneField tf = forward(f, quad);
        PicardRecord rec;
        rec.iter = m;
        rec.phi = functional_phi(f, tf, e);
        rec.lambda = lambda_of(f, tf, e);
        // S f from the transform already in hand
        PlaneField powered = tf;
        for (double& v : powered.values) v = ipow(v, e.qel_int());
        GridField sf = adjoint(powered, f.spec);
        for (double& v : sf.values) v = ipow(v, e.pel_int());
        rec.residual = el_residual(f, sf, rec.lambda, e);
        rec.step_distance = m == 0 ? 0.0 : distance_p(f, prev, p);
        res.trajectory.push_back(rec);
        if (m == iters) {
            res.final_state = ELState{f, rec.lambda, rec.phi, rec.residual};
            break;
        }
        double ns = lp_norm(sf, p);
        if (!(ns > 0) || !std::isfinite(ns)) throw DivergenceError("S f collapsed at iteration " + std::to_string(m));
        GridField next = f;
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = (1 - damping) * f[i] + damping * sf[i] / ns;
        double nn = lp_norm(next, p);
        if (!(nn > 0) || !std::isfinite(nn)) throw DivergenceError("iterate collapsed at iteration " + std::to_string(m));
        for (double& v : next.values) v /= nn;
        prev = std::move(f);
        f = std::move(next);
    }
    return res;
}

GridField multilinear_S(const FieldMatrix& fvec, QuadPtr quad, const Exponents& e) {
    const int pel = e.pel_int();
    const int qel = e.qel_int();
    if (static_cast<int>(fvec.size()) != pel)
        throw ShapeError("multilinear_S needs " + std::to_string(pel) + " rows, got " + std::to_string(fvec.size()));
    const GridSpec& spec = fvec.at(0).at(0).spec;
    GridField out(spec);
    std::fill(out.values.begin(), out.values.end(), 1.0);
    for (const auto& row : fvec) {
        if (static_cast<int>(row.size()) != qel)
            throw ShapeError("multilinear_S needs " + std::to_string(qel) + " entries per row");
        PlaneField prod;
        for (const auto& fij : row) {
            if (!(fij.spec == spec)) throw ShapeError("multilinear_S entries live on different grids");
            PlaneField tf = forward(fij, quad);
            if (prod.values.empty()) {
                prod = std::move(tf);
            } else {
                for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= tf.values[i];
            }
        }
        GridField a = adjoint(prod, spec);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= a[i];
    }
    return out;
}

HolderGap holder_domination_gap(const FieldMatrix& fvec, QuadPtr quad, const Exponents& e) {
    GridField lhs = multilinear_S(fvec, quad, e);
    const double root = 1.0 / (e.pel_int() * e.qel_int());
    GridField rhs(lhs.spec);
    std::fill(rhs.values.begin(), rhs.values.end(), 1.0);
    for (const auto& row : fvec)
        for (const auto& fij : row) {
            GridField a = fij;
            for (double& v : a.values) v = std::fabs(v);
            GridField s = script_S(a, quad, e);
            for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] *= std::pow(s[i], root);
        }
    HolderGap out{-std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        out.gap = std::max(out.gap, std::fabs(lhs[i]) - rhs[i]);
        out.scale = std::max(out.scale, rhs[i]);
    }
    return out;
}

EpsilonSplit epsilon_split(const GridField& f, double eps, const Exponents& e) {
    if (!(eps > 0)) throw DomainError("eps must be positive");
    const double p = e.p0.to_double();
    EpsilonSplit s;
    s.eps = eps;
    double nf = lp_norm(f, p);
    if (nf < eps) {
        s.phi_eps = GridField(f.spec);
        s.g_eps = f;
        s.g_norm = nf;
        return s;
    }
    double fmax = 0;
    for (double v : f.values) {
        if (!std::isfinite(v)) throw SplitError("eps-split unattainable: field has non-finite values");
        fmax = std::max(fmax, std::fabs(v));
    }
    const int m_hi = static_cast<int>(std::ceil(std::log2(fmax)));
    const int m_lo = m_hi - 40;  // keeps |f|/M < 2^52 so f - M is exact

    std::vector<double> r2(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        Vec3 x = f.node(i);
        r2[i] = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    }
    auto build = [&](double R, double M, GridField& phi, GridField& g) {
        phi = GridField(f.spec);
        g = GridField(f.spec);
        for (std::size_t i = 0; i < f.size(); ++i) {
            double v = f[i];
            double keep = r2[i] <= R * R ? std::copysign(std::min(std::fabs(v), M), v) : 0.0;
            phi[i] = keep;
            g[i] = v - keep;
        }
        return lp_norm(g, p);
    };

    // the last radius covers the whole box, so only non-finite data can fail
    const int j_hi = static_cast<int>(std::ceil(std::log2(f.spec.L * std::sqrt(static_cast<double>(f.spec.dim)))));
    GridField phi, g;
    for (int j = -4; j <= j_hi; ++j) {
        const double R = std::ldexp(1.0, j);
        if (build(R, std::ldexp(1.0, m_hi), phi, g) >= eps) continue;
        // smallest admissible M for this R; the norm of g is monotone in M
        int lo = m_lo, hi = m_hi;
        if (build(R, std::ldexp(1.0, lo), phi, g) < eps) hi = lo;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            if (build(R, std::ldexp(1.0, mid), phi, g) < eps) hi = mid;
            else lo = mid;
        }
        s.R = R;
        s.M = std::ldexp(1.0, hi);
        s.g_norm = build(s.R, s.M, phi, g);
        s.phi_eps = std::move(phi);
        s.g_eps = std::move(g);
        return s;
    }
    throw SplitError("eps = " + std::to_string(eps) + " unattainable on this grid");
}

ContractionProbe contraction_probe(const EpsilonSplit& split, const Rational& t, int pairs, QuadPtr quad,
                                   const Exponents& e, std::uint64_t seed) {
    const GridSpec& spec = split.phi_eps.spec;
    GridField f = split.phi_eps;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += split.g_eps[i];
    ContractionProbe out;
    out.lambda = lambda_of(f, quad, e);
    out.radius = std::sqrt(split.eps);
    const WeightedSpaceSpec xt{Family::X, t, e};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    for (int k = 0; k < pairs; ++k) {
        std::uint64_t sa = rng(), sb = rng();
        double ra = unit(rng), rb = unit(rng);
        GridField h = random_smooth_field(spec, sa);
        GridField ht = random_smooth_field(spec, sb);
        h = scaled(h, out.radius * ra / weighted_norm(h, xt));
        ht = scaled(ht, out.radius * rb / weighted_norm(ht, xt));
        GridField diff = h;
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= ht[i];
        double den = weighted_norm(diff, xt);
        if (den == 0) continue;  // identical pair carries no information
        GridField sh = script_S(h, quad, e);
        GridField sht = script_S(ht, quad, e);
        for (std::size_t i = 0; i < sh.size(); ++i) sh[i] = out.lambda * (sh[i] - sht[i]);
        out.ratio = std::max(out.ratio, weighted_norm(sh, xt) / den);
        ++out.pairs;
    }
    return out;
}

}  // namespace kplane
