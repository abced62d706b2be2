#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "kplane/exponents.hpp"
#include "kplane/fields.hpp"
#include "kplane/transform.hpp"

namespace kplane {

inline constexpr double kNoMollification = std::numeric_limits<double>::infinity();

enum class Variable { x_on_grid, y_on_planes };

// Symbol <xi>^s / <xi/Lambda>^s (bracket = true) or |xi|^s / <xi/Lambda>^s
// (bracket = false). Lambda = infinity drops the denominator. Frequencies are
// in cycles per unit length. With bracket = false and s < 0 the xi = 0 mode
// is set to zero.
struct MultiplierSpec {
    double s = 0;
    double Lambda = kNoMollification;
    Variable variable = Variable::x_on_grid;
    bool bracket = true;
    bool window = true;  // taper the input to zero at the box edge first
};

double multiplier_symbol(double xi_abs, double s, double Lambda, bool bracket);

// Smooth cutoff: 1 on |x_a| <= 3L/4 on every axis, exactly 0 at |x_a| = L.
GridField edge_window(const GridSpec& spec);
double taper(double u);  // exp(-1/x) glue: 0 for u <= 0, 1 for u >= 1

GridField apply_multiplier(const GridField& f, const MultiplierSpec& spec);
PlaneField apply_multiplier(const PlaneField& g, const MultiplierSpec& spec);

struct DecaySup {
    double supA = 0;  // |d^a m| |xi|^{|a|} / Lambda^s
    double supB = 0;  // |d^a m| / <xi>^{s-|a|}
    double supC = 0;  // |d^a (1/m)| <xi>^{s+|a|}, over |xi| <= 4 Lambda
};

// Finite-difference derivatives of the bracket symbol in R^n, n = alpha.size(),
// sampled along several rays on a log-spaced radial grid.
DecaySup multiplier_decay_sup(double s, double Lambda, const std::vector<int>& alpha);

// Radial cutoff eta: 1 on [0,1], 0 on [2, inf), eta(r) = 1 - taper(r - 1) between.
double lp_eta(double r);

struct LPStack {
    double Lambda = 4;
    int kappa = 2;  // 2^{kappa-1} < Lambda <= 2^kappa
    int j_max = 0;  // P_{j_max} is the identity on the frequency lattice
    GridSpec grid;
    std::string eta_description() const;
};

LPStack build_lp_stack(double Lambda, const GridSpec& grid);

enum class LPKind { P, Q, R };
// P_j: eta(2^-j xi); Q_j = P_j - P_{j-1}; R_j = I - P_j. The box is treated
// as periodic; no window is applied.
GridField lp_project(const GridField& f, LPKind which, int j, const LPStack& stack);

struct ProductParts {
    GridField matched;
    GridField remainder;
    GridField small;
};

// fg = sum_{j=1}^kappa (Q_j f P_j g + Q_j g P_{j-1} f)
//    + (R f P g + R g P f + R f R g) + P_0 f P_0 g, with R = R_kappa, P = P_kappa.
ProductParts product_decomposition(const GridField& f, const GridField& g, const LPStack& stack);

// ||D(fg)||_{L^r(u)} / (||Df||_{L^{2r}(u)} ||g||_{L^{2r}(u)} + ||f||_{L^{2r}(u)} ||Dg||_{L^{2r}(u)})
// with D the bracket mollified derivative, u = w^{t p_t} and r = p_t.
double kato_ponce_ratio(const GridField& f, const GridField& g, double s, double Lambda, const Rational& t,
                        const Exponents& e);

// ||D_y T f - T D_x f||_{L^2(M)} / ||T D_x f||_{L^2(M)}
double intertwine_gap(const GridField& f, double s, double Lambda, QuadPtr quad);
// ||D_x T* g - T* D_y g||_{L^2} / ||T* D_y g||_{L^2}
double intertwine_gap_adjoint(const PlaneField& g, double s, double Lambda, const GridSpec& spec);

// ||D_y^{k/p0'} T f||_{L^{p0}(M)} / ||f||_{L^{p0}}, with |eta|^{k/p0'}.
double smoothing_ratio(const GridField& f, QuadPtr quad, const Exponents& e);

// (||D^s_Lambda D^{-gamma} f||_{X_t}, ||D^s_Lambda f||_{X_t}^{1-gamma/s} ||f||_{X_t}^{gamma/s})
// on the windowed field; D^{-gamma} uses |xi|^{-gamma} with the zero mode removed.
std::pair<double, double> inverse_smoothing_interp(const GridField& f, double s, double gamma, double Lambda,
                                                   const Rational& t, const Exponents& e);

}  // namespace kplane
