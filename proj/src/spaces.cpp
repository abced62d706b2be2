#include "kplane/spaces.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "kplane/errors.hpp"

namespace kplane {

double weight_w(const Vec3& x, int dim, const Exponents& e) {
    double r2 = 0;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    return std::pow(1.0 + r2, 0.5 * e.pel.to_double() * (e.n - e.k));
}

double weight_wstar(const std::vector<double>& y, int n) {
    double r2 = 0;
    for (double v : y) r2 += v * v;
    return std::pow(1.0 + r2, 0.5 * n);
}

std::string to_string(Family f) {
    switch (f) {
        case Family::X: return "X";
        case Family::Y: return "Y";
        case Family::Xstar: return "Xstar";
        case Family::Ystar: return "Ystar";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    if (name == "X") return Family::X;
    if (name == "Y") return Family::Y;
    if (name == "Xstar") return Family::Xstar;
    if (name == "Ystar") return Family::Ystar;
    throw UsageError("unknown space family '" + name + "'");
}

Rational WeightedSpaceSpec::lebesgue_exponent() const {
    TScale ts = tscale(exponents, t);
    switch (family) {
        case Family::X: return ts.pt;
        case Family::Y: return ts.ptprime;
        case Family::Xstar: return ts.qtprime;
        case Family::Ystar: return ts.qt;
    }
    return ts.pt;
}

Rational WeightedSpaceSpec::weight_power() const {
    TScale ts = tscale(exponents, t);
    switch (family) {
        case Family::X: return t * ts.pt;
        case Family::Y: return t * ts.ptprime / exponents.pel;
        case Family::Xstar: return t * ts.qtprime;
        case Family::Ystar: return t * ts.qt / exponents.qel;
    }
    return Rational(0);
}

double weighted_norm(const GridField& f, const WeightedSpaceSpec& spec) {
    if (spec.family != Family::X && spec.family != Family::Y)
        throw ShapeError("family " + to_string(spec.family) + " is defined on plane fields");
    if (f.spec.dim != spec.exponents.n) throw ShapeError("field dimension differs from exponent n");
    const double r = spec.lebesgue_exponent().to_double();
    const Rational power = spec.weight_power();
    const double wp = power.to_double();
    // w^power = (1+|x|^2)^{power pel (n-k)/2}
    const double half_exp = 0.5 * wp * spec.exponents.pel.to_double() * (spec.exponents.n - spec.exponents.k);
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double a = std::fabs(f[i]);
        if (a == 0) continue;
        double term = std::pow(a, r);
        if (power != Rational(0)) {
            Vec3 x = f.node(i);
            double r2 = 0;
            for (int d = 0; d < f.spec.dim; ++d) r2 += x[d] * x[d];
            term *= std::pow(1.0 + r2, half_exp);
        }
        s += term;
    }
    return std::pow(s * f.spec.cell_volume(), 1.0 / r);
}

double weighted_norm(const PlaneField& g, const WeightedSpaceSpec& spec) {
    if (spec.family != Family::Xstar && spec.family != Family::Ystar)
        throw ShapeError("family " + to_string(spec.family) + " is defined on grid fields");
    const double r = spec.lebesgue_exponent().to_double();
    const Rational power = spec.weight_power();
    const double half_exp = 0.5 * power.to_double() * g.quad->n;
    // the weight depends on y only; tabulate it once
    std::vector<double> weight(g.per_direction(), 1.0);
    if (power != Rational(0))
        for (std::size_t i = 0; i < g.per_direction(); ++i) {
            double r2 = 0;
            for (double v : g.offset(i)) r2 += v * v;
            weight[i] = std::pow(1.0 + r2, half_exp);
        }
    double total = 0;
    for (std::size_t d = 0; d < g.directions(); ++d) {
        const double* row = g.row(d);
        double s = 0;
        for (std::size_t i = 0; i < g.per_direction(); ++i) {
            double a = std::fabs(row[i]);
            if (a != 0) s += std::pow(a, r) * weight[i];
        }
        total += g.quad->weights[d] * s;
    }
    return std::pow(total * g.offsets.cell_volume(), 1.0 / r);
}

double lp_norm(const GridField& f, double r) {
    double s = 0;
    for (double v : f.values) s += std::pow(std::fabs(v), r);
    return std::pow(s * f.spec.cell_volume(), 1.0 / r);
}

double lp_norm(const PlaneField& g, double r) {
    double total = 0;
    for (std::size_t d = 0; d < g.directions(); ++d) {
        const double* row = g.row(d);
        double s = 0;
        for (std::size_t i = 0; i < g.per_direction(); ++i) s += std::pow(std::fabs(row[i]), r);
        total += g.quad->weights[d] * s;
    }
    return std::pow(total * g.offsets.cell_volume(), 1.0 / r);
}

double radial_tail_estimate(const std::function<double(double)>& profile, const WeightedSpaceSpec& spec,
                            double L) {
    const auto& e = spec.exponents;
    const int n = (spec.family == Family::X || spec.family == Family::Y) ? e.n : e.n - e.k;
    const double r = spec.lebesgue_exponent().to_double();
    const double wp = spec.weight_power().to_double();
    // exponent of (1+rho^2) carried by the weight
    const double half_exp = (spec.family == Family::X || spec.family == Family::Y)
                                ? 0.5 * wp * e.pel.to_double() * (e.n - e.k)
                                : 0.5 * wp * e.n;
    // surface measure of the unit sphere in R^n (n=1 counts the two endpoints)
    const double sphere = 2 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
    boost::math::quadrature::exp_sinh<double> integrator;
    double tail = integrator.integrate([&](double s) {
        double rho = L + s;
        return std::pow(rho, n - 1) * std::pow(std::fabs(profile(rho)), r) * std::pow(1 + rho * rho, half_exp);
    });
    return sphere * tail;
}

std::pair<double, double> nesting_check(const GridField& f, const Rational& alpha, const Rational& beta,
                                        const Rational& gamma, Family family, const Exponents& e) {
    if (family != Family::X && family != Family::Y)
        throw ShapeError("nesting_check works on grid-field families X and Y");
    if (!(Rational(0) <= alpha && alpha <= gamma && gamma <= beta && beta < Rational(1)))
        throw DomainError("nesting_check needs 0 <= alpha <= gamma <= beta < 1, got alpha=" + alpha.str() +
                          ", gamma=" + gamma.str() + ", beta=" + beta.str());
    WeightedSpaceSpec sa{family, alpha, e}, sb{family, beta, e}, sg{family, gamma, e};
    double lhs = weighted_norm(f, sg);
    if (alpha == beta) return {lhs, lhs};
    const Rational theta = (beta - gamma) / (beta - alpha);
    double th = theta.to_double();
    double na = weighted_norm(f, sa);
    double nb = weighted_norm(f, sb);
    double rhs = (th == 0 ? 1.0 : std::pow(na, th)) * (th == 1 ? 1.0 : std::pow(nb, 1 - th));
    return {lhs, rhs};
}

BootstrapParameters bootstrap_parameters(const Exponents& e) {
    const Rational tmin = ap_thresholds(e).min();
    BootstrapParameters b;
    b.rho = tmin / Rational(2);
    b.rho1 = tmin / Rational(4);
    const Rational qel = e.q0 - Rational(1);
    b.rho2 = (b.rho1 + (e.q0 - Rational(2)) * b.rho) / qel;
    b.rho0 = (b.rho2 + (e.pel - Rational(1)) * b.rho) / e.pel;
    return b;
}

}  // namespace kplane
