#include "kplane/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kplane/errors.hpp"
#include "kplane/spaces.hpp"

namespace kplane {

double phi(const GridField& f, QuadPtr quad, const Exponents& e) { return functional_phi(f, std::move(quad), e); }

namespace {

// Node indices ordered by squared distance from the origin; integer keys
// make ties exact.
std::vector<std::size_t> radial_order(const GridSpec& spec) {
    std::vector<long> key(spec.size());
    for (std::size_t idx = 0; idx < key.size(); ++idx) {
        std::size_t rest = idx;
        long r2 = 0;
        for (int d = 0; d < spec.dim; ++d) {
            long c = static_cast<long>(rest % spec.N) - spec.N / 2;
            rest /= spec.N;
            r2 += c * c;
        }
        key[idx] = r2;
    }
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    return order;
}

double p0_norm(const GridField& f, const Exponents& e) { return lp_norm(f, e.p0.to_double()); }

}  // namespace

GridField rearrange(const GridField& f) {
    for (double v : f.values)
        if (v < 0) throw DomainError("rearrange needs a nonnegative field");
    std::vector<double> sorted = f.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto order = radial_order(f.spec);
    GridField out(f.spec);
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = sorted[i];
    return out;
}

RearrangementReport rearrangement_gain(const GridField& f, QuadPtr quad, const Exponents& e) {
    if (!e.q0.is_integer())
        throw GateError("rearrangement inequality requires an integer q0 (got q0=" + e.q0.str() +
                        "); the non-integer case is open");
    GridField fs = rearrange(f);
    const double q = e.q0.to_double();
    RearrangementReport r;
    double nf = p0_norm(f, e);
    if (nf == 0) throw DomainError("rearrangement gain of the zero field is undefined");
    r.norm_preservation_error = std::fabs(p0_norm(fs, e) - nf) / nf;
    r.transform_norm = lp_norm(forward(f, quad), q);
    r.transform_gain = lp_norm(forward(fs, quad), q) - r.transform_norm;
    return r;
}

std::pair<double, double> dilation_level(const GridField& f, const Exponents& e, DilationRule rule) {
    const double p = e.p0.to_double();
    const double cell = f.spec.cell_volume();
    std::vector<double> v;
    v.reserve(f.size());
    for (double x : f.values)
        if (x > 0) v.push_back(x);
    if (v.empty()) throw DomainError("dilation of the zero field is undefined");
    std::sort(v.begin(), v.end(), std::greater<>());

    if (rule == DilationRule::argmax_grid) {
        const double fmax = v.front();
        double best_t = 0, best_j = -1;
        for (int i = 0; i < 64; ++i) {
            double t = fmax * std::pow(10.0, -3.0 + 3.0 * i / 63.0);
            // mu{f > t}: the descending prefix of values strictly above t
            auto cnt = std::lower_bound(v.begin(), v.end(), t, std::greater<>()) - v.begin();
            double j = std::pow(t, p) * static_cast<double>(cnt) * cell;
            if (j > best_j) {
                best_j = j;
                best_t = t;
            }
        }
        return {best_t, best_j};
    }

    // Tied values count as infinitesimally separated (descending sort order),
    // so for t in [v[i+1], v[i]) the set {f > t} holds the first i+1 values and
    // J increases there up to v[i]^p (i+1) cell. This keeps t* continuous when
    // exact ties are perturbed, and sends t* to 1- on an indicator.
    double sup = 0;
    for (std::size_t i = 0; i < v.size(); ++i) sup = std::max(sup, std::pow(v[i], p) * (i + 1) * cell);
    const double target = 0.5 * sup;
    // the highest interval whose supremum reaches the target
    std::size_t i = 0;
    while (std::pow(v[i], p) * (i + 1) * cell < target) ++i;
    double lower = i + 1 < v.size() ? v[i + 1] : 0.0;
    double t = std::pow(target / ((i + 1) * cell), 1.0 / p);
    t = std::clamp(t, lower, v[i]);
    return {t, std::pow(t, p) * (i + 1) * cell};
}

double ball_radius(const GridField& f, double level) {
    // smallest |x| among nodes where f < level
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] >= level) continue;
        Vec3 x = f.node(i);
        best = std::min(best, std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    }
    return std::isinf(best) ? f.spec.L : best;
}

DilationResult dilation_normalize(const GridField& f, const Exponents& e, DilationRule rule, double level) {
    for (double v : f.values)
        if (v < 0) throw DomainError("dilation_normalize needs a nonnegative field");
    if (!(level > 0)) throw DomainError("dilation level must be positive");
    auto [t_star, objective] = dilation_level(f, e, rule);
    const double p = e.p0.to_double();
    const int n = f.spec.dim;
    DilationResult r;
    r.t_star = t_star;
    r.objective = objective;
    r.sigma = std::pow(level / t_star, p / n);
    const double amp = std::pow(r.sigma, n / p);
    r.f_normalized = GridField(f.spec);
    for (std::size_t i = 0; i < f.size(); ++i) {
        Vec3 x = f.node(i);
        for (int d = 0; d < n; ++d) x[d] *= r.sigma;
        r.f_normalized[i] = amp * interpolate(f, x);
    }
    r.ball_radius = ball_radius(r.f_normalized, level);
    return r;
}

SequenceResult extremize_sequence(const GridField& f0, QuadPtr quad, const Exponents& e, int iters,
                                  const SequenceOptions& opt) {
    if (!e.q0.is_integer())
        throw GateError("extremizing sequence requires an integer q0 (rearrangement inequality); got q0=" +
                        e.q0.str());
    for (double v : f0.values)
        if (v < 0) throw DomainError("extremize_sequence needs a nonnegative start");
    SequenceResult res;
    GridField f = f0;
    double nf = p0_norm(f, e);
    if (nf == 0) throw DomainError("extremize_sequence needs a nonzero start");
    for (double& v : f.values) v /= nf;

    double prev_phi = phi(f, quad, e);
    res.max_phi = prev_phi;
    res.trajectory.push_back({0, prev_phi, 1.0, 0.0, ball_radius(f, opt.level)});
    for (int it = 1; it <= iters; ++it) {
        GridField g = rearrange(f);
        DilationResult dil = dilation_normalize(g, e, opt.rule, opt.level);
        double ng = p0_norm(dil.f_normalized, e);
        for (double& v : dil.f_normalized.values) v /= ng;
        GridField next = picard_step(dil.f_normalized, quad, e, opt.damping);

        GridField diff = next;
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= f[i];
        SequenceRecord rec;
        rec.iter = it;
        rec.phi = phi(next, quad, e);
        rec.sigma = dil.sigma;
        rec.step_distance = p0_norm(diff, e);
        rec.ball_radius = dil.ball_radius;
        res.trajectory.push_back(rec);
        res.max_phi = std::max(res.max_phi, rec.phi);
        if (rec.phi < prev_phi - opt.slack) ++res.phi_drops;
        if (rec.phi < prev_phi - 10 * opt.slack)
            throw DriverError("phi dropped from " + std::to_string(prev_phi) + " to " + std::to_string(rec.phi) +
                              " at iteration " + std::to_string(it) + "; discretization breakdown");
        prev_phi = rec.phi;
        f = std::move(next);
    }
    res.f = std::move(f);
    return res;
}

GridField extremizer(const GridSpec& spec, const Exponents& e) {
    const double a = -0.5 * (e.n - e.k) * e.pel.to_double();
    return sample(
        [&](const Vec3& x) {
            double r2 = 0;
            for (int d = 0; d < spec.dim; ++d) r2 += x[d] * x[d];
            return std::pow(1.0 + r2, a);
        },
        spec);
}

}  // namespace kplane
