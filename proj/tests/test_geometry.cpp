#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "csfs/geometry.hpp"

using namespace csfs;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec3 random_unit(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v{n(rng), n(rng), n(rng)};
    return normalized(v);
}
}  // namespace

TEST_CASE("face centers project to zero local angles") {
    const Vec3 centers[6] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (int f = 0; f < 6; ++f) {
        const FaceCoords c = face_project(centers[f]);
        CHECK(c.face == f);
        CHECK(c.xi == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(c.eta == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("cube corner hits the equiangular square corner on each adjacent face") {
    const Vec3 corner = normalized({1, 1, 1});
    // lowest adjacent face id wins the seam tie
    CHECK(face_project(corner).face == 0);
    for (int f : {0, 1, 4}) {
        double X, Y;
        REQUIRE(face_plane_coords(f, corner, X, Y));
        CHECK(std::abs(std::atan(X)) == doctest::Approx(kPi / 4).epsilon(1e-14));
        CHECK(std::abs(std::atan(Y)) == doctest::Approx(kPi / 4).epsilon(1e-14));
    }
}

TEST_CASE("project/unproject round-trips 1e4 random points to 1e-12") {
    std::mt19937 rng(20240901);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p = random_unit(rng);
        const FaceCoords c = face_project(p);
        CHECK(c.face >= 0);
        CHECK(c.face <= 5);
        CHECK(std::abs(c.xi) <= kPi / 4 + 1e-12);
        CHECK(std::abs(c.eta) <= kPi / 4 + 1e-12);
        worst = std::max(worst, chordal_distance(p, face_unproject(c)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("unproject examples and errors") {
    const Vec3 p = face_unproject(0, kPi / 4, 0.0);
    CHECK(chordal_distance(p, normalized({1, 1, 0})) < 1e-15);
    CHECK(norm(face_unproject(3, 0.31, -0.42)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(face_unproject(6, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(face_unproject(-1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("seam assignment is deterministic and prefers the lowest face") {
    const Vec3 edge = normalized({1, 1, 0});  // between faces 0 and 1
    for (int rep = 0; rep < 3; ++rep) CHECK(face_project(edge).face == 0);
    const Vec3 edge45 = normalized({1, 0, 1});  // between faces 0 and 4
    CHECK(face_project(edge45).face == 0);
}

TEST_CASE("grid cell counts per kind and level") {
    CHECK(build_grid(GridKind::Icosahedral, 4).size() == 2562);
    CHECK(build_grid(GridKind::CubedSphere, 4).size() == 1536);
    CHECK(build_grid(GridKind::LatLon, 4).size() == 4050);
    CHECK(build_grid(GridKind::Icosahedral, 5).size() == 10242);
    CHECK(build_grid(GridKind::CubedSphere, 5).size() == 6144);
    CHECK(build_grid(GridKind::LatLon, 5).size() == 16200);
    CHECK(build_grid(GridKind::Icosahedral, 6).size() == 40962);
    CHECK(build_grid(GridKind::LatLon, 6).size() == 64800);
}

TEST_CASE("areas are positive and sum to 4*pi") {
    for (GridKind kind : {GridKind::Icosahedral, GridKind::CubedSphere, GridKind::LatLon}) {
        const int level = kind == GridKind::LatLon ? 4 : 3;
        const SphericalGrid g = build_grid(kind, level);
        double sum = 0.0;
        double min_area = 1e30;
        for (double a : g.areas) {
            sum += a;
            min_area = std::min(min_area, a);
        }
        CHECK(min_area > 0.0);
        CHECK(sum == doctest::Approx(4.0 * kPi).epsilon(1e-12));
        CHECK(std::abs(sum - 4.0 * kPi) < 1e-10);
    }
}

TEST_CASE("grid centers are unit vectors") {
    const SphericalGrid g = build_grid(GridKind::Icosahedral, 3);
    for (const Vec3& c : g.centers) CHECK(std::abs(norm(c) - 1.0) < 1e-12);
}

// The equiangular cells approach a min/max area ratio of 1/sqrt(2) ~ 0.707
// from above; at level 4 and beyond the ratio sits inside 0.7 +- 0.05.
TEST_CASE("cubed sphere cell area ratio is near 0.7 from level 4 up") {
    for (int level : {4, 5, 6}) {
        const SphericalGrid g = build_grid(GridKind::CubedSphere, level);
        double lo = 1e30, hi = 0.0;
        for (double a : g.areas) {
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        CHECK(lo / hi > 0.65);
        CHECK(lo / hi < 0.75);
    }
}

TEST_CASE("refining one level roughly quadruples N") {
    for (int level : {4, 5}) {
        const auto ico0 = build_grid(GridKind::Icosahedral, level).size();
        const auto ico1 = build_grid(GridKind::Icosahedral, level + 1).size();
        CHECK(ico1 == 4 * ico0 - 6);  // 10*4^(k+1)+2 vs 10*4^k+2
        const auto cs0 = build_grid(GridKind::CubedSphere, level).size();
        const auto cs1 = build_grid(GridKind::CubedSphere, level + 1).size();
        CHECK(cs1 == 4 * cs0);
        const auto ll0 = build_grid(GridKind::LatLon, level).size();
        const auto ll1 = build_grid(GridKind::LatLon, level + 1).size();
        CHECK(ll1 == 4 * ll0);
    }
}

TEST_CASE("unsupported grid configurations are rejected") {
    CHECK_THROWS_AS(build_grid(GridKind::LatLon, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(GridKind::Icosahedral, -1), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(GridKind::Icosahedral, 10), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid_kind("hexagonal"), std::invalid_argument);
}

TEST_CASE("latlon level 4 is the 45x90 grid at 4 degree spacing") {
    const SphericalGrid g = build_grid(GridKind::LatLon, 4);
    REQUIRE(g.size() == 45 * 90);
    // first row of centers sits at colatitude 2 degrees
    CHECK(g.centers[0].z == doctest::Approx(std::cos(2.0 * kPi / 180.0)).epsilon(1e-14));
    // identical band areas within a row
    CHECK(g.areas[0] == doctest::Approx(g.areas[89]).epsilon(1e-15));
}
