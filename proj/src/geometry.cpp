#include "kplane/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "kplane/errors.hpp"

namespace kplane {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(Vec3 v) {
    double r = std::sqrt(dot(v, v));
    for (double& c : v) c /= r;
    return v;
}

// Completes a unit vector u in R^3 to an orthonormal basis {u, a, b}.
std::pair<Vec3, Vec3> complete_basis(const Vec3& u) {
    Vec3 helper = std::fabs(u[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 a = normalized(cross(u, helper));
    Vec3 b = cross(u, a);
    return {a, b};
}

Direction line_in_plane(double angle) {
    Direction d;
    d.n = 2;
    d.k = 1;
    d.frame = {Vec3{std::cos(angle), std::sin(angle), 0.0}};
    d.coframe = {Vec3{-std::sin(angle), std::cos(angle), 0.0}};
    return d;
}

Direction from_unit_vector(const Vec3& u, int k) {
    auto [a, b] = complete_basis(u);
    Direction d;
    d.n = 3;
    d.k = k;
    if (k == 1) {
        d.frame = {u};
        d.coframe = {a, b};
    } else {
        d.frame = {a, b};
        d.coframe = {u};
    }
    return d;
}

std::vector<Vec3> fibonacci_hemisphere(int count) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        double z = 1.0 - (i + 0.5) / count;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * i;
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return pts;
}

using Mat3 = std::array<Vec3, 3>;

Vec3 rotate(const Mat3& rot, const Vec3& v) {
    return {dot(rot[0], v), dot(rot[1], v), dot(rot[2], v)};
}

// Uniform random rotation of R^3 from a random unit quaternion.
Mat3 random_rotation3(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    double q[4];
    double norm = 0;
    for (double& c : q) {
        c = gauss(rng);
        norm += c * c;
    }
    norm = std::sqrt(norm);
    for (double& c : q) c /= norm;
    double w = q[0], x = q[1], y = q[2], z = q[3];
    return Mat3{Vec3{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                Vec3{2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                Vec3{2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
}

}  // namespace

std::string to_string(QuadratureScheme s) {
    switch (s) {
        case QuadratureScheme::equiangular: return "equiangular";
        case QuadratureScheme::fibonacci_sphere: return "fibonacci_sphere";
        case QuadratureScheme::random_rotation: return "random_rotation";
    }
    return "unknown";
}

QuadratureScheme parse_scheme(const std::string& name) {
    if (name == "equiangular") return QuadratureScheme::equiangular;
    if (name == "fibonacci_sphere") return QuadratureScheme::fibonacci_sphere;
    if (name == "random_rotation") return QuadratureScheme::random_rotation;
    throw UsageError("unknown quadrature scheme '" + name + "'");
}

GrassmannianQuadrature build_quadrature(int n, int k, int count, QuadratureScheme scheme,
                                        std::uint64_t seed) {
    bool supported = (n == 2 && k == 1) || (n == 3 && (k == 1 || k == 2));
    if (!supported)
        throw UnsupportedGeometry("unsupported geometry (n,k)=(" + std::to_string(n) + "," +
                                  std::to_string(k) + "); supported: (2,1), (3,1), (3,2)");
    if (count < 4) throw DomainError("quadrature count must be >= 4, got " + std::to_string(count));
    if (n == 2 && scheme == QuadratureScheme::fibonacci_sphere)
        throw UnsupportedGeometry("fibonacci_sphere needs n=3; use equiangular for n=2");
    if (n == 3 && scheme == QuadratureScheme::equiangular)
        throw UnsupportedGeometry("equiangular needs n=2; use fibonacci_sphere for n=3");

    GrassmannianQuadrature q;
    q.n = n;
    q.k = k;
    q.scheme = scheme;
    q.directions.reserve(count);
    std::mt19937_64 rng(seed);

    if (n == 2) {
        double offset = 0.0;
        if (scheme == QuadratureScheme::random_rotation)
            offset = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
        for (int i = 0; i < count; ++i)
            q.directions.push_back(line_in_plane(offset + std::numbers::pi * i / count));
    } else {
        auto pts = fibonacci_hemisphere(count);
        if (scheme == QuadratureScheme::random_rotation) {
            Mat3 rot = random_rotation3(rng);
            for (auto& p : pts) {
                p = rotate(rot, p);
                if (p[2] < 0) p = {-p[0], -p[1], -p[2]};
            }
        }
        for (const auto& p : pts) q.directions.push_back(from_unit_vector(p, k));
    }
    q.weights.assign(count, 1.0 / count);
    q.rotation_error = projector_moment_error(q);
    return q;
}

double projector_moment_error(const GrassmannianQuadrature& q) {
    double m[3][3] = {};
    for (std::size_t i = 0; i < q.size(); ++i)
        for (const auto& v : q.directions[i].frame)
            for (int a = 0; a < q.n; ++a)
                for (int b = 0; b < q.n; ++b) m[a][b] += q.weights[i] * v[a] * v[b];
    double err = 0;
    double target = static_cast<double>(q.k) / q.n;
    for (int a = 0; a < q.n; ++a)
        for (int b = 0; b < q.n; ++b) err = std::max(err, std::fabs(m[a][b] - (a == b ? target : 0.0)));
    return err;
}

std::vector<double> project_complement(const Vec3& x, const Direction& d) {
    std::vector<double> out;
    out.reserve(d.coframe.size());
    for (const auto& c : d.coframe) out.push_back(dot(x, c));
    return out;
}

std::vector<double> project_plane(const Vec3& x, const Direction& d) {
    std::vector<double> out;
    out.reserve(d.frame.size());
    for (const auto& f : d.frame) out.push_back(dot(x, f));
    return out;
}

std::vector<Vec3> plane_points(const Direction& d, const std::vector<double>& offset, double spacing,
                               int half_count) {
    if (offset.size() != d.coframe.size())
        throw ShapeError("offset has " + std::to_string(offset.size()) + " coordinates, expected " +
                         std::to_string(d.coframe.size()));
    Vec3 base{0, 0, 0};
    for (std::size_t a = 0; a < offset.size(); ++a)
        for (int c = 0; c < 3; ++c) base[c] += offset[a] * d.coframe[a][c];

    std::vector<Vec3> pts;
    const int side = 2 * half_count + 1;
    if (d.k == 1) {
        pts.reserve(side);
        for (int j = -half_count; j <= half_count; ++j) {
            Vec3 p = base;
            for (int c = 0; c < 3; ++c) p[c] += j * spacing * d.frame[0][c];
            pts.push_back(p);
        }
    } else {
        pts.reserve(static_cast<std::size_t>(side) * side);
        for (int i = -half_count; i <= half_count; ++i)
            for (int j = -half_count; j <= half_count; ++j) {
                Vec3 p = base;
                for (int c = 0; c < 3; ++c)
                    p[c] += i * spacing * d.frame[0][c] + j * spacing * d.frame[1][c];
                pts.push_back(p);
            }
    }
    return pts;
}

double frame_determinant(const Direction& d) {
    std::vector<Vec3> rows = d.frame;
    rows.insert(rows.end(), d.coframe.begin(), d.coframe.end());
    if (d.n == 2) return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
    return dot(rows[0], cross(rows[1], rows[2]));
}

}  // namespace kplane
