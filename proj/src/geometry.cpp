#include "csfs/geometry.hpp"

#include <array>
#include <stdexcept>
#include <unordered_map>

namespace csfs {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline void check_face(int face) {
    if (face < 0 || face > 5) throw std::invalid_argument("face id out of 0..5");
}

}  // namespace

FaceCoords face_project(const Vec3& p) {
    const double vals[6] = {p.x, p.y, -p.x, -p.y, p.z, -p.z};
    int face = 0;
    for (int f = 1; f < 6; ++f)
        if (vals[f] > vals[face]) face = f;

    double X = 0.0, Y = 0.0;
    switch (face) {
        case 0: X = p.y / p.x;  Y = p.z / p.x;  break;
        case 1: X = -p.x / p.y; Y = p.z / p.y;  break;
        case 2: X = p.y / p.x;  Y = -p.z / p.x; break;
        case 3: X = -p.x / p.y; Y = -p.z / p.y; break;
        case 4: X = p.y / p.z;  Y = -p.x / p.z; break;
        case 5: X = -p.y / p.z; Y = -p.x / p.z; break;
    }
    return {face, std::atan(X), std::atan(Y)};
}

Vec3 face_point_from_plane(int face, double X, double Y) {
    check_face(face);
    const double s = 1.0 / std::sqrt(1.0 + X * X + Y * Y);
    switch (face) {
        case 0: return {s, s * X, s * Y};
        case 1: return {-s * X, s, s * Y};
        case 2: return {-s, -s * X, s * Y};
        case 3: return {s * X, -s, s * Y};
        case 4: return {-s * Y, s * X, s};
        default: return {s * Y, s * X, -s};
    }
}

Vec3 face_unproject(int face, double xi, double eta) {
    return face_point_from_plane(face, std::tan(xi), std::tan(eta));
}

bool face_plane_coords(int face, const Vec3& p, double& X, double& Y) {
    check_face(face);
    double axis = 0.0;
    switch (face) {
        case 0: axis = p.x; X = p.y / p.x;  Y = p.z / p.x;  break;
        case 1: axis = p.y; X = -p.x / p.y; Y = p.z / p.y;  break;
        case 2: axis = -p.x; X = p.y / p.x; Y = -p.z / p.x; break;
        case 3: axis = -p.y; X = -p.x / p.y; Y = -p.z / p.y; break;
        case 4: axis = p.z; X = p.y / p.z;  Y = -p.x / p.z; break;
        case 5: axis = -p.z; X = -p.y / p.z; Y = -p.x / p.z; break;
    }
    return axis > 1e-12;
}

Vec3 face_unproject(const FaceCoords& c) { return face_unproject(c.face, c.xi, c.eta); }

double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = dot(a, cross(b, c));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

double spherical_quad_area(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    return spherical_triangle_area(p0, p1, p2) + spherical_triangle_area(p0, p2, p3);
}

const char* grid_kind_name(GridKind kind) {
    switch (kind) {
        case GridKind::Icosahedral: return "icosahedral";
        case GridKind::CubedSphere: return "cubed_sphere";
        default: return "latlon";
    }
}

GridKind parse_grid_kind(const std::string& name) {
    if (name == "icosahedral") return GridKind::Icosahedral;
    if (name == "cubed_sphere") return GridKind::CubedSphere;
    if (name == "latlon") return GridKind::LatLon;
    throw std::invalid_argument("unknown grid kind: " + name);
}

namespace {

SphericalGrid build_cubed_sphere(int level) {
    const int m = 1 << level;
    const double d = (kPi / 2.0) / m;
    std::vector<double> edge(m + 1);
    for (int i = 0; i <= m; ++i) edge[i] = std::tan(-kPi / 4.0 + i * d);

    SphericalGrid g;
    g.kind = GridKind::CubedSphere;
    g.level = level;
    g.centers.reserve(std::size_t(6) * m * m);
    g.areas.reserve(std::size_t(6) * m * m);
    for (int f = 0; f < 6; ++f) {
        for (int i = 0; i < m; ++i) {
            const double xic = -kPi / 4.0 + (i + 0.5) * d;
            for (int j = 0; j < m; ++j) {
                const double etac = -kPi / 4.0 + (j + 0.5) * d;
                g.centers.push_back(face_unproject(f, xic, etac));
                const Vec3 p00 = face_point_from_plane(f, edge[i], edge[j]);
                const Vec3 p10 = face_point_from_plane(f, edge[i + 1], edge[j]);
                const Vec3 p11 = face_point_from_plane(f, edge[i + 1], edge[j + 1]);
                const Vec3 p01 = face_point_from_plane(f, edge[i], edge[j + 1]);
                g.areas.push_back(spherical_quad_area(p00, p10, p11, p01));
            }
        }
    }
    return g;
}

struct IcoMesh {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
};

IcoMesh base_icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoMesh m;
    const double raw[12][3] = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : raw) m.verts.push_back(normalized({v[0], v[1], v[2]}));
    const int f[20][3] = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (auto& t : f) {
        std::array<int, 3> tri = {t[0], t[1], t[2]};
        const Vec3 &a = m.verts[tri[0]], &b = m.verts[tri[1]], &c = m.verts[tri[2]];
        if (dot(a, cross(b - a, c - a)) < 0.0) std::swap(tri[1], tri[2]);
        m.tris.push_back(tri);
    }
    return m;
}

void subdivide(IcoMesh& m) {
    std::unordered_map<std::uint64_t, int> midpoint;
    midpoint.reserve(m.tris.size() * 2);
    auto mid = [&](int a, int b) {
        const std::uint64_t key =
            (std::uint64_t(std::min(a, b)) << 32) | std::uint64_t(std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = int(m.verts.size());
        m.verts.push_back(normalized(m.verts[a] + m.verts[b]));
        midpoint.emplace(key, id);
        return id;
    };
    std::vector<std::array<int, 3>> out;
    out.reserve(m.tris.size() * 4);
    for (const auto& t : m.tris) {
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        out.push_back({t[0], ab, ca});
        out.push_back({t[1], bc, ab});
        out.push_back({t[2], ca, bc});
        out.push_back({ab, bc, ca});
    }
    m.tris = std::move(out);
}

SphericalGrid build_icosahedral(int level) {
    IcoMesh m = base_icosahedron();
    for (int l = 0; l < level; ++l) subdivide(m);

    // Barycentric dual: each triangle hands the quad (vertex, edge midpoint,
    // centroid, other edge midpoint) to each of its three vertices.
    std::vector<double> area(m.verts.size(), 0.0);
    for (const auto& t : m.tris) {
        const Vec3 &a = m.verts[t[0]], &b = m.verts[t[1]], &c = m.verts[t[2]];
        const Vec3 mab = normalized(a + b);
        const Vec3 mbc = normalized(b + c);
        const Vec3 mca = normalized(c + a);
        const Vec3 g = normalized(a + b + c);
        area[t[0]] += spherical_quad_area(a, mab, g, mca);
        area[t[1]] += spherical_quad_area(b, mbc, g, mab);
        area[t[2]] += spherical_quad_area(c, mca, g, mbc);
    }

    SphericalGrid g;
    g.kind = GridKind::Icosahedral;
    g.level = level;
    g.centers = std::move(m.verts);
    g.areas = std::move(area);
    return g;
}

SphericalGrid build_latlon(int level) {
    const int rows = 45 << (level - 4);
    const int cols = 2 * rows;
    const double dth = kPi / rows;
    const double dlm = 2.0 * kPi / cols;

    SphericalGrid g;
    g.kind = GridKind::LatLon;
    g.level = level;
    g.centers.reserve(std::size_t(rows) * cols);
    g.areas.reserve(std::size_t(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        const double thc = (i + 0.5) * dth;
        const double band = dlm * (std::cos(i * dth) - std::cos((i + 1) * dth));
        const double sth = std::sin(thc), cth = std::cos(thc);
        for (int j = 0; j < cols; ++j) {
            const double lm = (j + 0.5) * dlm;
            g.centers.push_back({sth * std::cos(lm), sth * std::sin(lm), cth});
            g.areas.push_back(band);
        }
    }
    return g;
}

}  // namespace

SphericalGrid build_grid(GridKind kind, int level) {
    if (level < 0) throw std::invalid_argument("grid level must be non-negative");
    switch (kind) {
        case GridKind::Icosahedral:
            if (level > 9) throw std::invalid_argument("icosahedral grid supports levels 0..9");
            return build_icosahedral(level);
        case GridKind::CubedSphere:
            if (level > 10) throw std::invalid_argument("cubed sphere grid supports levels 0..10");
            return build_cubed_sphere(level);
        default:
            if (level < 4 || level > 9)
                throw std::invalid_argument("latlon grid supports levels 4..9");
            return build_latlon(level);
    }
}

}  // namespace csfs
