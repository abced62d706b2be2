#pragma once

#include "kplane/rational.hpp"

namespace kplane {

// Exponent system of the L^p -> L^q k-plane inequality for a given (n, k, q0).
struct Exponents {
    int n = 0;
    int k = 0;
    Rational q0;
    Rational p0;       // n q0 / (n - k + k q0)
    Rational qel;      // q0 - 1
    Rational pel;      // 1 / (p0 - 1)
    Rational pprime0;  // conjugate of p0
    Rational qprime0;  // conjugate of q0
    bool integer_case = false;  // qel and pel both integers

    int qel_int() const;  // throws GateError unless integer_case
    int pel_int() const;
};

// Builds the exponent system; throws DomainError naming the violated bound.
Exponents exponents_from(int n, int k, const Rational& q0);

// Strict upper bounds on t for the three weighted-space memberships used by
// the smoothing lemmas: w^{t p_t} in A_{p_t}, w_*^{t q'_t} in A_{q'_t} and
// w_*^{t q_t / qel} in A_{q_t}.
struct ApThresholds {
    Rational t_x;
    Rational t_star1;
    Rational t_star2;

    Rational min() const;
};

ApThresholds ap_thresholds(const Exponents& e);

// Exponents of the t-family: every base exponent divided by (1 - t).
struct TScale {
    Rational t;
    Rational pt;
    Rational qt;
    Rational ptprime;
    Rational qtprime;
};

TScale tscale(const Exponents& e, const Rational& t);

}  // namespace kplane
