#pragma once

#include <functional>
#include <string>
#include <utility>

#include "kplane/exponents.hpp"
#include "kplane/fields.hpp"

namespace kplane {

// w(x) = <x>^{pel (n-k)}
double weight_w(const Vec3& x, int dim, const Exponents& e);
// w_*(y) = <y>^n, independent of the direction
double weight_wstar(const std::vector<double>& y, int n);

enum class Family { X, Y, Xstar, Ystar };
std::string to_string(Family f);
Family parse_family(const std::string& name);

struct WeightedSpaceSpec {
    Family family = Family::X;
    Rational t;
    Exponents exponents;

    // Lebesgue exponent of the family at this t (p_t, p'_t, q'_t, q_t).
    Rational lebesgue_exponent() const;
    // Power applied to the base weight (t p_t, t p'_t/pel, t q'_t, t q_t/qel).
    Rational weight_power() const;
};

// Riemann-sum evaluation of the defining integral, raised to 1/exponent.
double weighted_norm(const GridField& f, const WeightedSpaceSpec& spec);
double weighted_norm(const PlaneField& g, const WeightedSpaceSpec& spec);

// Plain discrete L^r norms (no weight).
double lp_norm(const GridField& f, double r);
double lp_norm(const PlaneField& g, double r);

// Upper estimate of the part of the defining integral of |f|^r w^power that
// lies outside the box, for a radial closed-form f: the integral over
// |x| > L, which contains the complement of the cube. Returns the integral
// (not its r-th root).
double radial_tail_estimate(const std::function<double(double)>& profile, const WeightedSpaceSpec& spec,
                            double L);

// Convexity pair (||f||_{gamma}, ||f||_alpha^theta ||f||_beta^{1-theta}) with
// gamma = theta alpha + (1-theta) beta; family X or Y.
std::pair<double, double> nesting_check(const GridField& f, const Rational& alpha, const Rational& beta,
                                        const Rational& gamma, Family family, const Exponents& e);

// Weighted-space parameters of the smoothing bootstrap: rho = t_min/2 and
// rho1 = t_min/4, and rho2, rho0 solving
//   (q0 - 1) rho2 = rho1 + (q0 - 2) rho,   pel rho0 = rho2 + (pel - 1) rho,
// so rho1 <= rho2 <= rho0 <= rho < t_min.
struct BootstrapParameters {
    Rational rho;   // outer space X_rho
    Rational rho0;  // X_varrho where the derivative bound lives
    Rational rho1;  // Y_{*, varrho'}
    Rational rho2;  // Y_{varrho''}
};
BootstrapParameters bootstrap_parameters(const Exponents& e);

}  // namespace kplane
