#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kplane/geometry.hpp"

namespace kplane {

// Uniform grid of N^dim nodes x_i = -L + i h on [-L, L)^dim, h = 2L/N.
struct GridSpec {
    int dim = 2;
    int N = 256;
    double L = 8.0;

    double h() const { return 2.0 * L / N; }
    double coord(int i) const { return -L + i * h(); }
    std::size_t size() const;
    double cell_volume() const { return std::pow(h(), dim); }
    void validate() const;  // N a power of two, dim in 1..3, L > 0

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Real samples on a GridSpec, row-major with axis 0 slowest.
struct GridField {
    GridSpec spec;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(const GridSpec& s) : spec(s), values(s.size(), 0.0) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    Vec3 node(std::size_t flat) const;
};

// Samples g(theta, y) for every quadrature direction and every y on the
// (n-k)-dimensional offset grid, which shares N, L and h with the base grid.
struct PlaneField {
    std::shared_ptr<const GrassmannianQuadrature> quad;
    GridSpec offsets;
    std::vector<double> values;

    PlaneField() = default;
    PlaneField(std::shared_ptr<const GrassmannianQuadrature> q, int N, double L);

    std::size_t directions() const { return quad ? quad->size() : 0; }
    std::size_t per_direction() const { return offsets.size(); }
    double* row(std::size_t d) { return values.data() + d * per_direction(); }
    const double* row(std::size_t d) const { return values.data() + d * per_direction(); }
    std::vector<double> offset(std::size_t flat) const;
};

GridField sample(const std::function<double(const Vec3&)>& expr, const GridSpec& spec);
PlaneField sample_plane(const std::function<double(std::size_t dir, const std::vector<double>& y)>& expr,
                        std::shared_ptr<const GrassmannianQuadrature> quad, int N, double L);

// Multilinear interpolation inside [-L, L)^dim and exactly 0 outside. The node
// that would sit at +L is outside the stored grid and counts as 0.
double interpolate(const GridField& f, const Vec3& x);
double interpolate(const PlaneField& g, std::size_t dir, const std::vector<double>& y);

// Riemann-sum pairings.
double inner_product(const GridField& a, const GridField& b);
double inner_product(const PlaneField& a, const PlaneField& b);

void check_same_grid(const GridField& a, const GridField& b);
void check_same_planes(const PlaneField& a, const PlaneField& b);

// Binary snapshots ("KPF1" header followed by little-endian doubles).
void save_snapshot(const std::string& path, const GridField& f);
void save_snapshot(const std::string& path, const PlaneField& g);
GridField load_grid_snapshot(const std::string& path);
PlaneField load_plane_snapshot(const std::string& path, std::shared_ptr<const GrassmannianQuadrature> quad);
std::vector<unsigned char> snapshot_bytes(const GridField& f);
std::vector<unsigned char> snapshot_bytes(const PlaneField& g);
std::string content_hash(const std::vector<unsigned char>& bytes);  // 16 hex digits, FNV-1a

namespace detail {

// Raw multilinear kernels shared by the transform loops. u is the fractional
// index (x + L) / h.
inline double lerp_1d(const double* v, int N, double u) {
    if (!(u >= 0.0) || u >= N) return 0.0;
    int i = static_cast<int>(u);
    double a = u - i;
    double right = i + 1 < N ? v[i + 1] : 0.0;
    return (1.0 - a) * v[i] + a * right;
}

inline double lerp_2d(const double* v, int N, double u0, double u1) {
    if (!(u0 >= 0.0) || u0 >= N || !(u1 >= 0.0) || u1 >= N) return 0.0;
    int i = static_cast<int>(u0), j = static_cast<int>(u1);
    double a = u0 - i, b = u1 - j;
    const double* r0 = v + static_cast<std::size_t>(i) * N;
    double f00 = r0[j];
    double f01 = j + 1 < N ? r0[j + 1] : 0.0;
    double f10 = 0.0, f11 = 0.0;
    if (i + 1 < N) {
        const double* r1 = r0 + N;
        f10 = r1[j];
        f11 = j + 1 < N ? r1[j + 1] : 0.0;
    }
    return (1.0 - a) * ((1.0 - b) * f00 + b * f01) + a * ((1.0 - b) * f10 + b * f11);
}

inline double lerp_3d(const double* v, int N, double u0, double u1, double u2) {
    if (!(u0 >= 0.0) || u0 >= N) return 0.0;
    int i = static_cast<int>(u0);
    double a = u0 - i;
    const std::size_t plane = static_cast<std::size_t>(N) * N;
    double lo = lerp_2d(v + i * plane, N, u1, u2);
    double hi = i + 1 < N ? lerp_2d(v + (i + 1) * plane, N, u1, u2) : 0.0;
    return (1.0 - a) * lo + a * hi;
}

}  // namespace detail

}  // namespace kplane
