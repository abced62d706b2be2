#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "kplane/errors.hpp"
#include "kplane/fields.hpp"
#include "kplane/random_fields.hpp"

using namespace kplane;
using Catch::Approx;

namespace {

std::shared_ptr<const GrassmannianQuadrature> line_quad(int count) {
    return std::make_shared<const GrassmannianQuadrature>(build_quadrature(2, 1, count, QuadratureScheme::equiangular));
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("kplane_test_" + name)).string();
}

}  // namespace

TEST_CASE("grid geometry", "[fields]") {
    GridSpec s{2, 8, 2.0};
    CHECK(s.h() == 0.5);
    CHECK(s.coord(0) == -2.0);
    CHECK(s.coord(7) == 1.5);
    CHECK(s.size() == 64);
    CHECK(s.cell_volume() == 0.25);
    CHECK_THROWS(GridSpec{2, 12, 1.0}.validate());
    CHECK_THROWS(GridSpec{4, 8, 1.0}.validate());
    CHECK_THROWS(GridSpec{2, 8, -1.0}.validate());
}

TEST_CASE("sampling reproduces the expression at nodes", "[fields]") {
    GridSpec s{2, 16, 4.0};
    GridField one = sample([](const Vec3&) { return 1.0; }, s);
    for (double v : one.values) CHECK(v == 1.0);

    // extremizer profile for (n,k,p) = (2,1,4/3): exponent -(n-k)/(2(p-1)) = -3/2
    GridSpec e{2, 8, 2.0};  // nodes include the origin and (1, 0)
    GridField ext = sample([](const Vec3& x) { return std::pow(1 + x[0] * x[0] + x[1] * x[1], -1.5); }, e);
    CHECK(ext[4 * 8 + 4] == 1.0);
    CHECK(ext[6 * 8 + 4] == Approx(std::pow(2.0, -1.5)).epsilon(1e-15));

    GridField g = sample([](const Vec3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); }, s);
    const std::size_t centre = 8 * 16 + 8;
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] <= g[centre]);
    // radial symmetry on the node lattice: swap and reflect about the centre
    for (int i = 1; i < 16; ++i)
        for (int j = 1; j < 16; ++j) {
            CHECK(g[i * 16 + j] == Approx(g[j * 16 + i]).epsilon(1e-14));
            CHECK(g[i * 16 + j] == Approx(g[(16 - i) * 16 + j]).epsilon(1e-14));
        }
}

TEST_CASE("sampling a non-finite value names the node", "[fields]") {
    GridSpec s{2, 8, 1.0};
    try {
        sample([](const Vec3& x) { return x[0] == 0 && x[1] == 0 ? std::numeric_limits<double>::infinity() : 1.0; }, s);
        FAIL("expected a sampling error");
    } catch (const SamplingError& err) {
        CHECK_THAT(err.what(), Catch::Matchers::ContainsSubstring("0"));
    }
    auto q = line_quad(4);
    CHECK_THROWS_AS(sample_plane([](std::size_t, const std::vector<double>&) { return std::nan(""); }, q, 8, 1.0),
                    SamplingError);
}

TEST_CASE("interpolation: nodes, outside, affine exactness", "[fields]") {
    for (int dim : {1, 2, 3}) {
        GridSpec s{dim, 8, 2.0};
        auto affine = [](const Vec3& x) { return 0.5 + 1.5 * x[0] - 0.25 * x[1] + 2.0 * x[2]; };
        GridField f = sample(affine, s);
        for (std::size_t i = 0; i < f.size(); i += 7) CHECK(interpolate(f, f.node(i)) == f[i]);
        std::mt19937_64 rng(dim);
        // stay below the last node so every cell has both neighbours inside
        std::uniform_real_distribution<double> u(-2.0, 2.0 - s.h());
        for (int t = 0; t < 50; ++t) {
            Vec3 x{u(rng), dim > 1 ? u(rng) : 0.0, dim > 2 ? u(rng) : 0.0};
            CHECK(interpolate(f, x) == Approx(affine(x)).margin(1e-12));
        }
        CHECK(interpolate(f, {2.5, 0, 0}) == 0.0);
        CHECK(interpolate(f, {-2.01, 0, 0}) == 0.0);
        CHECK(interpolate(f, {2.0, 0, 0}) == 0.0);  // +L is outside [-L, L)
    }
}

TEST_CASE("interpolation is monotone in the samples", "[fields]") {
    GridSpec s{2, 16, 3.0};
    GridField lo = random_bump_field(s, 1);
    GridField hi = lo;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (double& v : hi.values) v += u(rng);
    for (int t = 0; t < 200; ++t) {
        Vec3 x{6 * u(rng) - 3, 6 * u(rng) - 3, 0};
        CHECK(interpolate(lo, x) <= interpolate(hi, x));
    }
}

TEST_CASE("plane interpolation along offsets", "[fields]") {
    auto q = line_quad(4);
    PlaneField g = sample_plane([](std::size_t d, const std::vector<double>& y) { return d + 2.0 * y[0]; }, q, 16, 2.0);
    CHECK(interpolate(g, 2, {0.3}) == Approx(2.6).margin(1e-12));
    CHECK(interpolate(g, 1, {5.0}) == 0.0);
}

TEST_CASE("inner products", "[fields]") {
    for (int N : {4, 8, 32}) {
        GridSpec s{2, N, 1.0};
        GridField ones = sample([](const Vec3&) { return 1.0; }, s);
        CHECK(inner_product(ones, ones) == Approx(4.0).epsilon(1e-12));
    }
    GridSpec s{2, 16, 2.0};
    GridField left = sample([](const Vec3& x) { return x[0] < 0 ? 1.0 : 0.0; }, s);
    GridField right = sample([](const Vec3& x) { return x[0] >= 0 ? 1.0 : 0.0; }, s);
    CHECK(inner_product(left, right) == 0.0);

    GridField a = random_smooth_field(s, 1), b = random_smooth_field(s, 2), c = random_smooth_field(s, 3);
    CHECK(inner_product(a, a) >= 0);
    CHECK(inner_product(a, b) == Approx(inner_product(b, a)).epsilon(1e-14));
    GridField combo = a;
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = 2 * a[i] - 3 * c[i];
    CHECK(inner_product(combo, b) ==
          Approx(2 * inner_product(a, b) - 3 * inner_product(c, b)).margin(1e-12 * (1 + std::fabs(inner_product(a, b)))));

    auto q = line_quad(8);
    PlaneField pa = random_plane_field(q, 16, 2.0, 4), pb = random_plane_field(q, 16, 2.0, 5);
    CHECK(inner_product(pa, pb) == Approx(inner_product(pb, pa)).epsilon(1e-14));
    PlaneField ones = sample_plane([](std::size_t, const std::vector<double>&) { return 1.0; }, q, 16, 2.0);
    CHECK(inner_product(ones, ones) == Approx(4.0).epsilon(1e-12));  // weights sum to 1, offsets span length 4

    CHECK_THROWS_AS(inner_product(a, random_smooth_field(GridSpec{2, 32, 2.0}, 1)), ShapeError);
    PlaneField other = random_plane_field(line_quad(4), 16, 2.0, 1);
    CHECK_THROWS_AS(inner_product(pa, other), ShapeError);
}

TEST_CASE("snapshot round trip and header layout", "[fields]") {
    GridSpec s{2, 16, 3.0};
    GridField f = random_smooth_field(s, 12);
    const std::string path = temp_path("grid.kpf");
    save_snapshot(path, f);
    GridField back = load_grid_snapshot(path);
    CHECK(back.spec == f.spec);
    CHECK(back.values == f.values);
    CHECK(content_hash(snapshot_bytes(back)) == content_hash(snapshot_bytes(f)));

    auto bytes = snapshot_bytes(f);
    REQUIRE(bytes.size() > 4);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "KPF1");
    // header: magic, int32 n, int32 N, double L, int32 kind, int32 directions
    const std::size_t header = 4 + 4 + 4 + 8 + 4 + 4;
    CHECK(bytes.size() == header + 8 * f.size());
    double first = 0;
    std::memcpy(&first, bytes.data() + header, 8);
    CHECK(first == f[0]);

    auto q = line_quad(8);
    PlaneField g = random_plane_field(q, 16, 3.0, 2);
    const std::string ppath = temp_path("plane.kpf");
    save_snapshot(ppath, g);
    PlaneField gback = load_plane_snapshot(ppath, q);
    CHECK(gback.values == g.values);
    CHECK_THROWS(load_plane_snapshot(ppath, line_quad(4)));
    CHECK_THROWS(load_grid_snapshot(ppath));
    CHECK_THROWS_AS(load_grid_snapshot(temp_path("missing.kpf")), IoError);

    std::filesystem::remove(path);
    std::filesystem::remove(ppath);
}

TEST_CASE("content hash is FNV-1a over the bytes", "[fields]") {
    // published FNV-1a 64-bit test vectors
    CHECK(content_hash({}) == "cbf29ce484222325");
    CHECK(content_hash({'a'}) == "af63dc4c8601ec8c");
    CHECK(content_hash({'f', 'o', 'o', 'b', 'a', 'r'}) == "85944171f73967e8");
}
