#include "kplane/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fftw3.h>

#include "kplane/errors.hpp"
#include "kplane/spaces.hpp"

namespace kplane {

namespace {

using cplx = std::complex<double>;

// In-place unnormalized DFT over a dim-dimensional N^dim array.
void dft(std::vector<cplx>& data, int dim, int N, int sign) {
    std::vector<int> dims(dim, N);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), ptr, ptr, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

// |xi| at every lattice frequency of an N^dim grid with spacing h.
std::vector<double> lattice_radius(int dim, int N, double h) {
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= N;
    std::vector<double> r(total);
    const double dxi = 1.0 / (N * h);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        double s = 0;
        for (int d = 0; d < dim; ++d) {
            int i = static_cast<int>(rest % N);
            rest /= N;
            int m = i < N / 2 ? i : i - N;
            s += (m * dxi) * (m * dxi);
        }
        r[idx] = std::sqrt(s);
    }
    return r;
}

std::vector<cplx> to_spectrum(const std::vector<double>& v, int dim, int N) {
    std::vector<cplx> c(v.begin(), v.end());
    dft(c, dim, N, FFTW_FORWARD);
    return c;
}

std::vector<double> from_spectrum(std::vector<cplx> c, int dim, int N) {
    dft(c, dim, N, FFTW_BACKWARD);
    std::vector<double> out(c.size());
    const double norm = 1.0 / static_cast<double>(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real() * norm;
    return out;
}

// multiply a real array by a radial symbol in frequency space
std::vector<double> filter(const std::vector<double>& v, int dim, int N, double h,
                           const std::function<double(double)>& symbol) {
    auto c = to_spectrum(v, dim, N);
    auto r = lattice_radius(dim, N, h);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol(r[i]);
    return from_spectrum(std::move(c), dim, N);
}

double axis_window(double x, double L) {
    const double inner = 0.75 * L;
    double a = std::fabs(x);
    if (a <= inner) return 1.0;
    return 1.0 - taper((a - inner) / (L - inner));
}

double bracket(double x) { return std::sqrt(1.0 + x * x); }

double weighted_lr(const GridField& f, double r, const GridField& weight) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::fabs(f[i]), r) * weight[i];
    return std::pow(s * f.spec.cell_volume(), 1.0 / r);
}

GridField product(const GridField& a, const GridField& b) {
    GridField out(a.spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

}  // namespace

double taper(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    double a = std::exp(-1.0 / u);
    double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

double multiplier_symbol(double xi_abs, double s, double Lambda, bool use_bracket) {
    double num;
    if (use_bracket) {
        num = std::pow(bracket(xi_abs), s);
    } else {
        if (xi_abs == 0) return s == 0 ? 1.0 : 0.0;
        num = std::pow(xi_abs, s);
    }
    if (std::isinf(Lambda)) return num;
    return num / std::pow(bracket(xi_abs / Lambda), s);
}

GridField edge_window(const GridSpec& spec) {
    return sample(
        [&](const Vec3& x) {
            double w = 1.0;
            for (int d = 0; d < spec.dim; ++d) w *= axis_window(x[d], spec.L);
            return w;
        },
        spec);
}

GridField apply_multiplier(const GridField& f, const MultiplierSpec& spec) {
    if (spec.variable != Variable::x_on_grid) throw ShapeError("grid fields take the x_on_grid multiplier");
    if (spec.Lambda < 1) throw DomainError("Lambda must be >= 1");
    std::vector<double> v = f.values;
    if (spec.window) {
        GridField w = edge_window(f.spec);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
    }
    GridField out(f.spec);
    out.values = filter(v, f.spec.dim, f.spec.N, f.spec.h(),
                        [&](double r) { return multiplier_symbol(r, spec.s, spec.Lambda, spec.bracket); });
    return out;
}

PlaneField apply_multiplier(const PlaneField& g, const MultiplierSpec& spec) {
    if (spec.variable != Variable::y_on_planes) throw ShapeError("plane fields take the y_on_planes multiplier");
    if (spec.Lambda < 1) throw DomainError("Lambda must be >= 1");
    const auto& os = g.offsets;
    std::vector<double> window(g.per_direction(), 1.0);
    if (spec.window)
        for (std::size_t i = 0; i < window.size(); ++i)
            for (double y : g.offset(i)) window[i] *= axis_window(y, os.L);
    auto radius = lattice_radius(os.dim, os.N, os.h());
    std::vector<double> symbol(radius.size());
    for (std::size_t i = 0; i < radius.size(); ++i)
        symbol[i] = multiplier_symbol(radius[i], spec.s, spec.Lambda, spec.bracket);

    PlaneField out = g;
    std::vector<cplx> buf(g.per_direction());
    std::vector<int> dims(os.dim, os.N);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd = fftw_plan_dft(os.dim, dims.data(), ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft(os.dim, dims.data(), ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    const double norm = 1.0 / static_cast<double>(buf.size());
    for (std::size_t d = 0; d < g.directions(); ++d) {
        const double* src = g.row(d);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = src[i] * window[i];
        fftw_execute(fwd);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= symbol[i];
        fftw_execute(bwd);
        double* dst = out.row(d);
        for (std::size_t i = 0; i < buf.size(); ++i) dst[i] = buf[i].real() * norm;
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return out;
}

DecaySup multiplier_decay_sup(double s, double Lambda, const std::vector<int>& alpha) {
    const int n = static_cast<int>(alpha.size());
    if (n < 1 || n > 3) throw DomainError("multi-index must have 1 to 3 entries");
    int order = 0;
    for (int a : alpha) {
        if (a < 0) throw DomainError("multi-index entries must be nonnegative");
        order += a;
    }
    if (order > n / 2 + 1) throw DomainError("|alpha| exceeds n/2 + 1");

    auto m = [&](const Vec3& xi) {
        double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
        return multiplier_symbol(r, s, Lambda, true);
    };
    auto minv = [&](const Vec3& xi) { return 1.0 / m(xi); };

    // nested central differences, one axis at a time
    std::function<double(const std::function<double(const Vec3&)>&, std::vector<int>, Vec3, double)> deriv =
        [&](const std::function<double(const Vec3&)>& fn, std::vector<int> a, Vec3 xi, double step) -> double {
        for (int ax = 0; ax < n; ++ax) {
            if (a[ax] == 0) continue;
            a[ax] -= 1;
            Vec3 plus = xi, minus = xi;
            plus[ax] += step;
            minus[ax] -= step;
            return (deriv(fn, a, plus, step) - deriv(fn, a, minus, step)) / (2 * step);
        }
        return fn(xi);
    };

    std::vector<Vec3> rays;
    if (n == 1) {
        rays = {Vec3{1, 0, 0}};
    } else if (n == 2) {
        for (int j = 0; j <= 6; ++j) rays.push_back({std::cos(j * M_PI / 12), std::sin(j * M_PI / 12), 0});
    } else {
        const double a = 1 / std::sqrt(2.0), b = 1 / std::sqrt(3.0);
        rays = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {a, a, 0}, {a, 0, a}, {0, a, a}, {b, b, b}};
    }

    DecaySup out;
    const double Ls = std::pow(Lambda, s);
    const int points = 241;
    const double r_lo = 1e-2, r_hi = 1e2 * Lambda;
    for (const auto& ray : rays)
        for (int i = 0; i < points; ++i) {
            double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (points - 1));
            Vec3 xi{r * ray[0], r * ray[1], r * ray[2]};
            double step = 1e-3 * bracket(r);
            double dm = std::fabs(deriv(m, alpha, xi, step));
            double br = bracket(r);
            out.supA = std::max(out.supA, dm * std::pow(r, order) / Ls);
            out.supB = std::max(out.supB, dm / std::pow(br, s - order));
            if (r <= 4 * Lambda) {
                double di = std::fabs(deriv(minv, alpha, xi, step));
                out.supC = std::max(out.supC, di * std::pow(br, s + order));
            }
        }
    return out;
}

double lp_eta(double r) {
    if (r <= 1) return 1.0;
    if (r >= 2) return 0.0;
    return 1.0 - taper(r - 1.0);
}

std::string LPStack::eta_description() const {
    return "eta(r)=1 on r<=1, 0 on r>=2, 1-psi(r-1) between, psi(u)=e^{-1/u}/(e^{-1/u}+e^{-1/(1-u)})";
}

LPStack build_lp_stack(double Lambda, const GridSpec& grid) {
    if (!(Lambda >= 1) || std::isinf(Lambda)) throw DomainError("LP stack needs a finite Lambda >= 1");
    grid.validate();
    LPStack st;
    st.Lambda = Lambda;
    st.grid = grid;
    st.kappa = static_cast<int>(std::ceil(std::log2(Lambda)));
    while (std::ldexp(1.0, st.kappa - 1) >= Lambda) --st.kappa;
    while (std::ldexp(1.0, st.kappa) < Lambda) ++st.kappa;
    const double max_xi = std::sqrt(static_cast<double>(grid.dim)) / (2 * grid.h());
    int j = 0;
    while (std::ldexp(1.0, j) < max_xi) ++j;
    st.j_max = std::max(j, st.kappa);
    return st;
}

namespace {

double lp_mask(LPKind which, int j, double r) {
    switch (which) {
        case LPKind::P: return lp_eta(std::ldexp(r, -j));
        case LPKind::Q: return lp_eta(std::ldexp(r, -j)) - lp_eta(std::ldexp(r, -(j - 1)));
        case LPKind::R: return 1.0 - lp_eta(std::ldexp(r, -j));
    }
    return 0.0;
}

struct Spectrum {
    std::vector<cplx> coeffs;
    std::vector<double> radius;
    int dim, N;

    Spectrum(const GridField& f)
        : coeffs(to_spectrum(f.values, f.spec.dim, f.spec.N)),
          radius(lattice_radius(f.spec.dim, f.spec.N, f.spec.h())),
          dim(f.spec.dim),
          N(f.spec.N) {}

    GridField project(const GridSpec& spec, LPKind which, int j) const {
        std::vector<cplx> c = coeffs;
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= lp_mask(which, j, radius[i]);
        GridField out(spec);
        out.values = from_spectrum(std::move(c), dim, N);
        return out;
    }
};

void check_level(LPKind which, int j, const LPStack& st) {
    int lo = which == LPKind::Q ? 1 : 0;
    if (j < lo || j > st.j_max)
        throw DomainError("LP level " + std::to_string(j) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(st.j_max) + "]");
}

}  // namespace

GridField lp_project(const GridField& f, LPKind which, int j, const LPStack& stack) {
    check_level(which, j, stack);
    if (!(f.spec == stack.grid)) throw ShapeError("LP stack was built for a different grid");
    return Spectrum(f).project(f.spec, which, j);
}

ProductParts product_decomposition(const GridField& f, const GridField& g, const LPStack& stack) {
    check_same_grid(f, g);
    if (!(f.spec == stack.grid)) throw ShapeError("LP stack was built for a different grid");
    const int kappa = stack.kappa;
    Spectrum sf(f), sg(g);
    ProductParts parts{GridField(f.spec), GridField(f.spec), GridField(f.spec)};
    auto add = [](GridField& acc, const GridField& a, const GridField& b) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * b[i];
    };
    for (int j = 1; j <= kappa; ++j) {
        add(parts.matched, sf.project(f.spec, LPKind::Q, j), sg.project(f.spec, LPKind::P, j));
        add(parts.matched, sg.project(f.spec, LPKind::Q, j), sf.project(f.spec, LPKind::P, j - 1));
    }
    GridField rf = sf.project(f.spec, LPKind::R, kappa), rg = sg.project(f.spec, LPKind::R, kappa);
    GridField pf = sf.project(f.spec, LPKind::P, kappa), pg = sg.project(f.spec, LPKind::P, kappa);
    add(parts.remainder, rf, pg);
    add(parts.remainder, rg, pf);
    add(parts.remainder, rf, rg);
    add(parts.small, sf.project(f.spec, LPKind::P, 0), sg.project(f.spec, LPKind::P, 0));
    return parts;
}

double kato_ponce_ratio(const GridField& f, const GridField& g, double s, double Lambda, const Rational& t,
                        const Exponents& e) {
    check_same_grid(f, g);
    if (Lambda < 4) throw DomainError("kato_ponce_ratio needs Lambda >= 4");
    const TScale ts = tscale(e, t);
    const double r = ts.pt.to_double();
    const double power = (t * ts.pt).to_double();
    GridField u = sample([&](const Vec3& x) { return std::pow(weight_w(x, f.spec.dim, e), power); }, f.spec);

    // the window is applied once to the inputs so that every term sees the
    // same functions
    GridField win = edge_window(f.spec);
    GridField fw = product(f, win), gw = product(g, win);
    MultiplierSpec d{s, Lambda, Variable::x_on_grid, true, false};
    GridField dfg = apply_multiplier(product(fw, gw), d);
    GridField df = apply_multiplier(fw, d);
    GridField dg = apply_multiplier(gw, d);
    double num = weighted_lr(dfg, r, u);
    double den = weighted_lr(df, 2 * r, u) * weighted_lr(gw, 2 * r, u) +
                 weighted_lr(fw, 2 * r, u) * weighted_lr(dg, 2 * r, u);
    if (!(den > 0) || !std::isfinite(den)) throw RatioError("Kato-Ponce denominator vanishes");
    return num / den;
}

double intertwine_gap(const GridField& f, double s, double Lambda, QuadPtr quad) {
    PlaneField lhs = apply_multiplier(forward(f, quad), MultiplierSpec{s, Lambda, Variable::y_on_planes});
    PlaneField rhs = forward(apply_multiplier(f, MultiplierSpec{s, Lambda, Variable::x_on_grid}), quad);
    double den = lp_norm(rhs, 2.0);
    for (std::size_t i = 0; i < lhs.values.size(); ++i) lhs.values[i] -= rhs.values[i];
    if (den == 0) return 0.0;
    return lp_norm(lhs, 2.0) / den;
}

double intertwine_gap_adjoint(const PlaneField& g, double s, double Lambda, const GridSpec& spec) {
    // Both sides are built on a box of twice the half-width, where the taper
    // equals 1 over the requested box, and compared on the requested box only.
    spec.validate();
    const GridSpec wide{spec.dim, 2 * spec.N, 2 * spec.L};
    GridField lhs = apply_multiplier(adjoint(g, wide), MultiplierSpec{s, Lambda, Variable::x_on_grid});
    GridField rhs = adjoint(apply_multiplier(g, MultiplierSpec{s, Lambda, Variable::y_on_planes}), wide);
    double num = 0, den = 0;
    const int lo = spec.N / 2, hi = lo + spec.N;
    for (std::size_t flat = 0; flat < wide.size(); ++flat) {
        std::size_t rest = flat;
        bool inside = true;
        for (int a = 0; a < spec.dim; ++a) {
            const int i = static_cast<int>(rest % wide.N);
            rest /= wide.N;
            inside = inside && i >= lo && i < hi;
        }
        if (!inside) continue;
        num += (lhs[flat] - rhs[flat]) * (lhs[flat] - rhs[flat]);
        den += rhs[flat] * rhs[flat];
    }
    if (den == 0) return 0.0;
    return std::sqrt(num / den);
}

double smoothing_ratio(const GridField& f, QuadPtr quad, const Exponents& e) {
    if (!(e.p0 > Rational(1) && e.p0 <= Rational(2))) throw DomainError("smoothing_ratio needs p0 in (1, 2]");
    const double p = e.p0.to_double();
    double nf = lp_norm(f, p);
    if (nf == 0) throw DomainError("smoothing ratio of the zero field is undefined");
    const double order = (Rational(e.k) / e.pprime0).to_double();
    PlaneField dy = apply_multiplier(forward(f, quad),
                                     MultiplierSpec{order, kNoMollification, Variable::y_on_planes, false});
    return lp_norm(dy, p) / nf;
}

std::pair<double, double> inverse_smoothing_interp(const GridField& f, double s, double gamma, double Lambda,
                                                   const Rational& t, const Exponents& e) {
    if (gamma < 0 || s < 0) throw DomainError("s and gamma must be nonnegative");
    if (gamma > s) throw DomainError("gamma must not exceed s");
    GridField fw = product(f, edge_window(f.spec));
    const WeightedSpaceSpec xt{Family::X, t, e};
    GridField lhs_field(f.spec);
    lhs_field.values = filter(fw.values, f.spec.dim, f.spec.N, f.spec.h(), [&](double r) {
        double m = multiplier_symbol(r, s, Lambda, true);
        return gamma == 0 ? m : m * multiplier_symbol(r, -gamma, kNoMollification, false);
    });
    GridField ds = apply_multiplier(fw, MultiplierSpec{s, Lambda, Variable::x_on_grid, true, false});
    double lhs = weighted_norm(lhs_field, xt);
    double nds = weighted_norm(ds, xt);
    double nf = weighted_norm(fw, xt);
    double rhs = s == 0 ? nf : std::pow(nds, 1 - gamma / s) * std::pow(nf, gamma / s);
    return {lhs, rhs};
}

}  // namespace kplane
