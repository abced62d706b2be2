#include "kplane/exponents.hpp"

#include <algorithm>
#include <string>

#include "kplane/errors.hpp"

namespace kplane {

namespace {

Rational conjugate(const Rational& p) { return p / (p - Rational(1)); }

}  // namespace

int Exponents::qel_int() const {
    if (!integer_case)
        throw GateError("operation requires integer q_el and p_el; got q_el=" + qel.str() +
                        ", p_el=" + pel.str());
    return static_cast<int>(qel.num());
}

int Exponents::pel_int() const {
    if (!integer_case)
        throw GateError("operation requires integer q_el and p_el; got q_el=" + qel.str() +
                        ", p_el=" + pel.str());
    return static_cast<int>(pel.num());
}

Exponents exponents_from(int n, int k, const Rational& q0) {
    if (n < 2) throw DomainError("n must be >= 2, got " + std::to_string(n));
    if (k < 1 || k > n - 1)
        throw DomainError("k must satisfy 1 <= k <= n-1, got k=" + std::to_string(k) +
                          " with n=" + std::to_string(n));
    if (q0 <= Rational(1)) throw DomainError("q0 must be > 1, got " + q0.str());
    if (q0 > Rational(n + 1))
        throw DomainError("q0 must be <= n+1 = " + std::to_string(n + 1) + ", got " + q0.str());

    Exponents e;
    e.n = n;
    e.k = k;
    e.q0 = q0;
    e.p0 = Rational(n) * q0 / (Rational(n - k) + Rational(k) * q0);
    e.qel = q0 - Rational(1);
    e.pel = Rational(1) / (e.p0 - Rational(1));
    e.pprime0 = conjugate(e.p0);
    e.qprime0 = conjugate(q0);
    e.integer_case = e.qel.is_integer() && e.pel.is_integer();
    return e;
}

Rational ApThresholds::min() const { return std::min({t_x, t_star1, t_star2}); }

ApThresholds ap_thresholds(const Exponents& e) {
    const Rational one(1);
    const Rational pm1 = e.p0 - one;
    const Rational qm1 = e.q0 - one;
    ApThresholds a;
    a.t_x = pm1 * pm1 / (e.p0 * Rational(e.n - e.k - 1) + one);
    a.t_star1 = one / (e.q0 * Rational(e.n) - e.q0 + one);
    a.t_star2 = qm1 * qm1 / (e.q0 * Rational(e.n - 1) + one);
    return a;
}

TScale tscale(const Exponents& e, const Rational& t) {
    if (t < Rational(0) || t >= Rational(1))
        throw DomainError("t must lie in [0,1), got " + t.str());
    const Rational s = Rational(1) - t;
    return TScale{t, e.p0 / s, e.q0 / s, e.pprime0 / s, e.qprime0 / s};
}

}  // namespace kplane
