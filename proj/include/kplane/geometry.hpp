#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kplane {

using Vec3 = std::array<double, 3>;  // points in R^2 use the first two slots

// A k-plane through the origin: k orthonormal frame vectors spanning it and
// n-k coframe vectors spanning its orthogonal complement.
struct Direction {
    int n = 0;
    int k = 0;
    std::vector<Vec3> frame;
    std::vector<Vec3> coframe;
};

enum class QuadratureScheme { equiangular, fibonacci_sphere, random_rotation };

std::string to_string(QuadratureScheme s);
QuadratureScheme parse_scheme(const std::string& name);

// Weighted direction set standing in for the invariant probability measure
// on the Grassmannian. One representative per antipodal pair is kept.
struct GrassmannianQuadrature {
    int n = 0;
    int k = 0;
    QuadratureScheme scheme = QuadratureScheme::equiangular;
    std::vector<Direction> directions;
    std::vector<double> weights;
    // max entry of |sum_w P_theta - (k/n) I|, P_theta the projector onto theta
    double rotation_error = 0.0;

    std::size_t size() const { return directions.size(); }
};

// Supported (n,k): (2,1), (3,1), (3,2). Equiangular is the n=2 scheme,
// fibonacci_sphere the n=3 scheme, and random_rotation applies a seeded
// random rotation to whichever of those fits n.
GrassmannianQuadrature build_quadrature(int n, int k, int count, QuadratureScheme scheme,
                                        std::uint64_t seed = 0);

// Second-moment defect max |sum_w P - (k/n) I| of an arbitrary weighted set.
double projector_moment_error(const GrassmannianQuadrature& q);

// Coordinates of x in the coframe basis (n-k numbers).
std::vector<double> project_complement(const Vec3& x, const Direction& d);
// Coordinates of x in the frame basis (k numbers).
std::vector<double> project_plane(const Vec3& x, const Direction& d);

// Points y + sum_b t_b frame_b with every t_b = j*spacing, |j| <= half_count.
// The offset y is given in coframe coordinates.
std::vector<Vec3> plane_points(const Direction& d, const std::vector<double>& offset, double spacing,
                               int half_count);

// Frame followed by coframe as the rows of an n x n matrix; its determinant.
double frame_determinant(const Direction& d);

}  // namespace kplane
