#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kplane/exponents.hpp"
#include "kplane/geometry.hpp"

namespace kplane {

// Flat key=value experiment configuration. Blank lines and lines starting
// with '#' are ignored; lists are comma separated. Every key has a default,
// so an empty file is a valid configuration.
//
//   experiment   one of experiment_names()
//   n, k, q0     geometry; q0 accepts "3", "5/2" or "2.5"
//   N, L         grid points per axis (power of two) and box half-width;
//                when neither is given and n=3 they become 64 and 6
//   scheme       equiangular | fibonacci_sphere | random_rotation; the
//                default is fibonacci_sphere when n=3
//   count        number of quadrature directions
//   s            derivative order for multiplier experiments
//   Lambda       list of mollification scales
//   t            weight index (rational) for X_t norms
//   eps          list of split sizes, as fractions of ||f||_{X_0}
//   iters        iteration budget for picard / extremize
//   seed         base seed for every random draw
//   grid_sizes   list of N for refinement studies
//   refine       fixed_L (N doubles in the same box) | fixed_h (box doubles with N)
//   trials       number of seeded trials / pairs
//   pairs        pairs per contraction probe
//   damping      relaxation factor for fixed-point iterations
//   snapshots    true | false: write .kpf snapshots of result fields
//   out          output directory
struct ExperimentConfig {
    std::string experiment;
    int n = 2;
    int k = 1;
    Rational q0{3};
    int N = 256;
    double L = 8.0;
    QuadratureScheme scheme = QuadratureScheme::equiangular;
    int count = 256;
    double s = 1.0;
    std::vector<double> Lambda{4, 16, 64, 256};
    Rational t{0};
    std::vector<double> eps{0.2, 0.1, 0.05};
    int iters = 200;
    std::uint64_t seed = 7;
    std::vector<int> grid_sizes{64, 128, 256};
    std::string refine = "fixed_L";
    int trials = 20;
    int pairs = 32;
    double damping = 0.5;
    bool snapshots = false;
    std::string out = ".";

    Exponents exponents() const { return exponents_from(n, k, q0); }
    // (key, value) pairs in documentation order, values in config syntax
    std::vector<std::pair<std::string, std::string>> echo() const;
};

const std::vector<std::string>& experiment_names();
const std::vector<std::string>& config_keys();

// Throws UsageError on unknown keys, malformed lines or bad values, and the
// exponents' DomainError when (n, k, q0) is outside the admissible range.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Range checks shared by parse_config and programmatic callers.
void validate(const ExperimentConfig& cfg);

}  // namespace kplane
