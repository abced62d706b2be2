#include "kplane/fields.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "kplane/errors.hpp"

namespace kplane {

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(N);
    return s;
}

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) throw ShapeError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (N < 2 || !std::has_single_bit(static_cast<unsigned>(N)))
        throw ShapeError("grid size N must be a power of two, got " + std::to_string(N));
    if (!(L > 0.0) || !std::isfinite(L)) throw ShapeError("half-width L must be positive and finite");
}

Vec3 GridField::node(std::size_t flat) const {
    Vec3 x{0, 0, 0};
    for (int d = spec.dim - 1; d >= 0; --d) {
        x[d] = spec.coord(static_cast<int>(flat % spec.N));
        flat /= spec.N;
    }
    return x;
}

PlaneField::PlaneField(std::shared_ptr<const GrassmannianQuadrature> q, int N, double L)
    : quad(std::move(q)), offsets{quad->n - quad->k, N, L} {
    offsets.validate();
    values.assign(quad->size() * offsets.size(), 0.0);
}

std::vector<double> PlaneField::offset(std::size_t flat) const {
    std::vector<double> y(offsets.dim);
    for (int d = offsets.dim - 1; d >= 0; --d) {
        y[d] = offsets.coord(static_cast<int>(flat % offsets.N));
        flat /= offsets.N;
    }
    return y;
}

GridField sample(const std::function<double(const Vec3&)>& expr, const GridSpec& spec) {
    spec.validate();
    GridField f(spec);
    for (std::size_t i = 0; i < f.size(); ++i) {
        Vec3 x = f.node(i);
        double v = expr(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite sample " << v << " at node (" << x[0];
            for (int d = 1; d < spec.dim; ++d) os << ", " << x[d];
            os << ")";
            throw SamplingError(os.str());
        }
        f[i] = v;
    }
    return f;
}

PlaneField sample_plane(const std::function<double(std::size_t, const std::vector<double>&)>& expr,
                        std::shared_ptr<const GrassmannianQuadrature> quad, int N, double L) {
    PlaneField g(std::move(quad), N, L);
    for (std::size_t d = 0; d < g.directions(); ++d)
        for (std::size_t i = 0; i < g.per_direction(); ++i) {
            double v = expr(d, g.offset(i));
            if (!std::isfinite(v)) throw SamplingError("non-finite plane sample in direction " + std::to_string(d));
            g.row(d)[i] = v;
        }
    return g;
}

double interpolate(const GridField& f, const Vec3& x) {
    const auto& s = f.spec;
    const double inv_h = 1.0 / s.h();
    const double* v = f.values.data();
    switch (s.dim) {
        case 1: return detail::lerp_1d(v, s.N, (x[0] + s.L) * inv_h);
        case 2: return detail::lerp_2d(v, s.N, (x[0] + s.L) * inv_h, (x[1] + s.L) * inv_h);
        default:
            return detail::lerp_3d(v, s.N, (x[0] + s.L) * inv_h, (x[1] + s.L) * inv_h, (x[2] + s.L) * inv_h);
    }
}

double interpolate(const PlaneField& g, std::size_t dir, const std::vector<double>& y) {
    const auto& s = g.offsets;
    const double inv_h = 1.0 / s.h();
    if (s.dim == 1) return detail::lerp_1d(g.row(dir), s.N, (y[0] + s.L) * inv_h);
    return detail::lerp_2d(g.row(dir), s.N, (y[0] + s.L) * inv_h, (y[1] + s.L) * inv_h);
}

void check_same_grid(const GridField& a, const GridField& b) {
    if (!(a.spec == b.spec) || a.size() != b.size())
        throw ShapeError("grid fields live on different grids");
}

void check_same_planes(const PlaneField& a, const PlaneField& b) {
    if (a.quad != b.quad && !(a.quad && b.quad && a.quad->size() == b.quad->size() &&
                              a.quad->weights == b.quad->weights && a.quad->n == b.quad->n &&
                              a.quad->k == b.quad->k))
        throw ShapeError("plane fields use different quadratures");
    if (!(a.offsets == b.offsets)) throw ShapeError("plane fields use different offset grids");
}

double inner_product(const GridField& a, const GridField& b) {
    check_same_grid(a, b);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.spec.cell_volume();
}

double inner_product(const PlaneField& a, const PlaneField& b) {
    check_same_planes(a, b);
    double total = 0;
    for (std::size_t d = 0; d < a.directions(); ++d) {
        const double* ra = a.row(d);
        const double* rb = b.row(d);
        double s = 0;
        for (std::size_t i = 0; i < a.per_direction(); ++i) s += ra[i] * rb[i];
        total += a.quad->weights[d] * s;
    }
    return total * a.offsets.cell_volume();
}

namespace {

constexpr char kMagic[4] = {'K', 'P', 'F', '1'};

template <class T>
void put(std::vector<unsigned char>& out, T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T take(const std::vector<unsigned char>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw IoError("truncated snapshot");
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    pos += sizeof(T);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

std::vector<unsigned char> encode(int n, int N, double L, int kind, int dirs, const std::vector<double>& v) {
    std::vector<unsigned char> out(kMagic, kMagic + 4);
    put<std::int32_t>(out, n);
    put<std::int32_t>(out, N);
    put<double>(out, L);
    put<std::int32_t>(out, kind);
    put<std::int32_t>(out, dirs);
    out.reserve(out.size() + v.size() * sizeof(double));
    for (double x : v) put<double>(out, x);
    return out;
}

struct Header {
    int n, N, kind, dirs;
    double L;
};

Header decode_header(const std::vector<unsigned char>& in, std::size_t& pos) {
    if (in.size() < 4 || std::memcmp(in.data(), kMagic, 4) != 0) throw IoError("not a KPF1 snapshot");
    pos = 4;
    Header h{};
    h.n = take<std::int32_t>(in, pos);
    h.N = take<std::int32_t>(in, pos);
    h.L = take<double>(in, pos);
    h.kind = take<std::int32_t>(in, pos);
    h.dirs = take<std::int32_t>(in, pos);
    return h;
}

void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write to '" + path + "' failed");
}

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<unsigned char> snapshot_bytes(const GridField& f) {
    return encode(f.spec.dim, f.spec.N, f.spec.L, 0, 0, f.values);
}

std::vector<unsigned char> snapshot_bytes(const PlaneField& g) {
    return encode(g.quad->n, g.offsets.N, g.offsets.L, 1, static_cast<int>(g.directions()), g.values);
}

void save_snapshot(const std::string& path, const GridField& f) { write_file(path, snapshot_bytes(f)); }
void save_snapshot(const std::string& path, const PlaneField& g) { write_file(path, snapshot_bytes(g)); }

GridField load_grid_snapshot(const std::string& path) {
    auto bytes = read_file(path);
    std::size_t pos = 0;
    Header h = decode_header(bytes, pos);
    if (h.kind != 0) throw IoError("snapshot '" + path + "' holds a plane field");
    GridSpec spec{h.n, h.N, h.L};
    spec.validate();
    GridField f(spec);
    for (double& v : f.values) v = take<double>(bytes, pos);
    return f;
}

PlaneField load_plane_snapshot(const std::string& path, std::shared_ptr<const GrassmannianQuadrature> quad) {
    auto bytes = read_file(path);
    std::size_t pos = 0;
    Header h = decode_header(bytes, pos);
    if (h.kind != 1) throw IoError("snapshot '" + path + "' holds a grid field");
    if (h.n != quad->n || h.dirs != static_cast<int>(quad->size()))
        throw ShapeError("snapshot '" + path + "' does not match the supplied quadrature");
    PlaneField g(std::move(quad), h.N, h.L);
    for (double& v : g.values) v = take<double>(bytes, pos);
    return g;
}

std::string content_hash(const std::vector<unsigned char>& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace kplane
