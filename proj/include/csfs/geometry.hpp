#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace csfs {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a.x += b.x; a.y += b.y; a.z += b.z; return a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { double n = norm(a); return {a.x / n, a.y / n, a.z / n}; }
inline double chordal_distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Local equiangular coordinates on one cube face, xi/eta in [-pi/4, pi/4].
///
/// Face convention: faces 0-3 are equatorial with centers on +x, +y, -x, -y;
/// face 4 is +z, face 5 is -z. On equatorial faces xi increases eastward and
/// eta increases northward. On face 4 the xi axis points along +y and the eta
/// axis along -x; on face 5 xi points along +y and eta along +x. Each local
/// frame (e_xi, e_eta, outward) is right-handed, so cell corner loops taken
/// counterclockwise in (xi,eta) are counterclockwise seen from outside.
struct FaceCoords {
    int face = 0;
    double xi = 0.0;
    double eta = 0.0;
};

/// Face containing p, ties at cube edges/corners broken toward the lowest face id.
FaceCoords face_project(const Vec3& p);

/// Gnomonic inverse X = tan(xi), Y = tan(eta) on the face plane, normalized to the sphere.
/// Throws std::invalid_argument for a face id outside 0..5.
Vec3 face_unproject(const FaceCoords& c);
Vec3 face_unproject(int face, double xi, double eta);

/// Point on the sphere for plane coordinates (X, Y) = (tan xi, tan eta) of a face.
Vec3 face_point_from_plane(int face, double X, double Y);

/// Gnomonic plane coordinates of p on a prescribed face, defined whenever p is
/// on the face's hemisphere (returns false otherwise). Unlike face_project the
/// result may lie outside [-1,1]^2.
bool face_plane_coords(int face, const Vec3& p, double& X, double& Y);

/// Signed area of the spherical triangle (a, b, c), positive for counterclockwise
/// orientation seen from outside the sphere.
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Area of the spherical quadrilateral with counterclockwise corners p0..p3.
double spherical_quad_area(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);

enum class GridKind { Icosahedral, CubedSphere, LatLon };

const char* grid_kind_name(GridKind kind);
GridKind parse_grid_kind(const std::string& name);  // throws std::invalid_argument

/// One of the three sphere partitions used for midpoint-rule quadrature.
/// centers[i] is the cell center on the unit sphere, areas[i] the exact
/// spherical cell area in steradians; areas sum to 4*pi.
struct SphericalGrid {
    GridKind kind = GridKind::Icosahedral;
    int level = 0;
    std::vector<Vec3> centers;
    std::vector<double> areas;

    std::size_t size() const { return centers.size(); }
};

/// Cell counts: icosahedral level k has 10*4^k + 2 cells (one per vertex of the
/// k-times bisected icosahedron, with barycentric dual cell areas), cubed sphere
/// level k has 6*4^k cells, lat-lon level k (k >= 4) has 45*2^(k-4) latitude bands
/// of 90*2^(k-4) cells centered at band/sector midpoints.
/// Throws std::invalid_argument for unsupported kind/level combinations.
SphericalGrid build_grid(GridKind kind, int level);

}  // namespace csfs
