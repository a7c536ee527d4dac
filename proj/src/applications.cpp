#include "csfs/applications.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csfs {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Associated Legendre P_l^m(z) without the Condon-Shortley phase.
double assoc_legendre(int l, int m, double z) {
    double pmm = 1.0;
    if (m > 0) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        double fact = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= fact * s;
            fact += 2.0;
        }
    }
    if (l == m) return pmm;
    double pmm1 = z * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pmm1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = (z * (2.0 * ll - 1.0) * pmm1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmm1;
        pmm1 = pll;
    }
    return pll;
}

}  // namespace

double real_sph_harm(int l, int m, const Vec3& p) {
    if (l < 0 || std::abs(m) > l) throw std::invalid_argument("invalid spherical harmonic degree/order");
    const int am = std::abs(m);
    double ratio = 1.0;  // (l-|m|)! / (l+|m|)!
    for (int i = l - am + 1; i <= l + am; ++i) ratio /= double(i);
    const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
    const double plm = assoc_legendre(l, am, p.z);
    if (m == 0) return norm * plm;
    const double lon = std::atan2(p.y, p.x);
    const double trig = m > 0 ? std::cos(am * lon) : std::sin(am * lon);
    return std::sqrt(2.0) * norm * plm * trig;
}

double relative_l2_error(const std::vector<double>& phi1, const std::vector<double>& phi2,
                         const std::vector<double>& phi_exact, const std::vector<double>& areas,
                         int out_dim) {
    const std::size_t n = areas.size();
    if (phi1.size() != n * out_dim || phi2.size() != n * out_dim || phi_exact.size() != n * out_dim)
        throw std::invalid_argument("field lengths do not match the area list");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int d = 0; d < out_dim; ++d) {
            const std::size_t k = i * out_dim + d;
            const double diff = phi1[k] - phi2[k];
            num += diff * diff * areas[i];
            den += phi_exact[k] * phi_exact[k] * areas[i];
        }
    }
    if (den == 0.0) throw std::invalid_argument("reference field is identically zero");
    return std::sqrt(num / den);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs at least two points");
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalarFieldOnGrid solve_greens(const ScalarFieldOnGrid& field, const Kernel& kernel,
                               const TraversalConfig& config, SolveReport* report) {
    if (kernel.kind != KernelKind::Laplace && kernel.kind != KernelKind::Biharmonic)
        throw std::invalid_argument("solve_greens expects the Laplace or biharmonic kernel");
    if (field.areas.size() != field.points.size() || field.values.size() != field.points.size())
        throw std::invalid_argument("field points, areas and values differ in length");

    double mean = 0.0, total_area = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        mean += field.values[i] * field.areas[i];
        total_area += field.areas[i];
        max_abs = std::max(max_abs, std::abs(field.values[i]));
    }
    mean /= total_area;

    ParticleSet particles;
    particles.positions = field.points;
    particles.weights.resize(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
        particles.weights[i] = field.values[i] * field.areas[i];

    SumStats stats;
    PotentialField phi = summed_potential(particles, particles, kernel, config, &stats);

    if (report) {
        report->input_mean = mean;
        report->mean_warning =
            kernel.kind == KernelKind::Laplace && std::abs(mean) > 1e-8 * max_abs;
        report->sum = stats;
    }

    ScalarFieldOnGrid out;
    out.points = field.points;
    out.areas = field.areas;
    out.values = std::move(phi.values);
    return out;
}

ScalarFieldOnGrid sal_potential(const ScalarFieldOnGrid& ssh, const SalParams& params,
                                const TraversalConfig& config, SumStats* stats) {
    if (ssh.areas.size() != ssh.points.size())
        throw std::invalid_argument("SAL input is missing per-point areas");
    if (ssh.values.size() != ssh.points.size())
        throw std::invalid_argument("SAL input values and points differ in length");

    ParticleSet particles;
    particles.positions = ssh.points;
    particles.weights.resize(ssh.size());
    for (std::size_t i = 0; i < ssh.size(); ++i)
        particles.weights[i] = ssh.values[i] * ssh.areas[i];

    Kernel kernel;
    kernel.kind = KernelKind::Sal;
    kernel.sal = params;
    PotentialField phi = summed_potential(particles, particles, kernel, config, stats);

    ScalarFieldOnGrid out;
    out.points = ssh.points;
    out.areas = ssh.areas;
    out.values = std::move(phi.values);
    return out;
}

double rossby_haurwitz_zeta(const Vec3& p) {
    // (2*pi/7) sin(lat) + 30 sin(lat) cos^4(lat) cos(4 lon) with sin(lat) = z;
    // cos^4(lat) cos(4 lon) = x^4 - 6 x^2 y^2 + y^4 on the unit sphere.
    const double x2 = p.x * p.x, y2 = p.y * p.y;
    return (2.0 * kPi / 7.0) * p.z + 30.0 * p.z * (x2 * x2 - 6.0 * x2 * y2 + y2 * y2);
}

BveState bve_initial(BveInit kind, const SphericalGrid& grid, bool with_tracer) {
    BveState state;
    state.positions = grid.centers;
    state.areas = grid.areas;
    state.grid_centers = grid.centers;
    state.zeta.resize(grid.size());
    if (kind == BveInit::RossbyHaurwitz) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            state.zeta[i] = rossby_haurwitz_zeta(grid.centers[i]);
    } else {
        const double lat = kPi / 20.0;
        const Vec3 xc{std::cos(lat), 0.0, std::sin(lat)};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec3 d = grid.centers[i] - xc;
            state.zeta[i] = 4.0 * kPi * std::exp(-16.0 * dot(d, d)) - 0.196353;
        }
    }
    if (with_tracer) {
        state.tracer.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) state.tracer[i] = grid.centers[i].z;
    }
    return state;
}

namespace {

std::vector<Vec3> biot_savart_velocity(const std::vector<Vec3>& positions,
                                       const std::vector<double>& zeta,
                                       const std::vector<double>& areas,
                                       const TraversalConfig& config) {
    ParticleSet particles;
    particles.positions = positions;
    particles.weights.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) particles.weights[i] = zeta[i] * areas[i];
    Kernel kernel;
    kernel.kind = KernelKind::BiotSavart;
    PotentialField u = summed_potential(particles, particles, kernel, config);
    std::vector<Vec3> vel(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        vel[i] = {u.values[3 * i], u.values[3 * i + 1], u.values[3 * i + 2]};
    return vel;
}

// Lat-lon buckets for approximate nearest-neighbor gathering on the sphere.
class SphereBuckets {
public:
    explicit SphereBuckets(const std::vector<Vec3>& pts) : pts_(pts) {
        rows_ = std::max(4, int(std::sqrt(double(pts.size()) / 8.0)));
        cols_ = 2 * rows_;
        buckets_.resize(std::size_t(rows_) * cols_);
        for (int i = 0; i < int(pts.size()); ++i) buckets_[index_of(pts[i])].push_back(i);
    }

    // k nearest by chordal distance among candidates from expanding bucket rings.
    void knn(const Vec3& q, int k, std::vector<int>& out) const {
        const int bi = row_of(q), bj = col_of(q);
        std::vector<int> cand;
        int ring = 0;
        const int max_ring = std::max(rows_, cols_ / 2);
        while (ring <= max_ring) {
            gather_ring(bi, bj, ring, cand);
            if (int(cand.size()) >= k && ring >= 1) break;
            ++ring;
        }
        gather_ring(bi, bj, ring + 1, cand);  // safety margin for ring-boundary effects
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        std::vector<std::pair<double, int>> scored;
        scored.reserve(cand.size());
        for (int i : cand) {
            const Vec3 d = pts_[i] - q;
            scored.emplace_back(dot(d, d), i);
        }
        const int kk = std::min<int>(k, int(scored.size()));
        std::partial_sort(scored.begin(), scored.begin() + kk, scored.end());
        out.clear();
        for (int i = 0; i < kk; ++i) out.push_back(scored[i].second);
    }

private:
    int row_of(const Vec3& p) const {
        const double th = std::acos(std::clamp(p.z, -1.0, 1.0));
        return std::min(rows_ - 1, int(th / kPi * rows_));
    }
    int col_of(const Vec3& p) const {
        double lon = std::atan2(p.y, p.x);
        if (lon < 0) lon += 2.0 * kPi;
        return std::min(cols_ - 1, int(lon / (2.0 * kPi) * cols_));
    }
    std::size_t index_of(const Vec3& p) const {
        return std::size_t(row_of(p)) * cols_ + col_of(p);
    }
    void gather_ring(int bi, int bj, int ring, std::vector<int>& cand) const {
        for (int di = -ring; di <= ring; ++di) {
            const int i = bi + di;
            if (i < 0 || i >= rows_) continue;
            for (int dj = -ring; dj <= ring; ++dj) {
                if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
                const int j = ((bj + dj) % cols_ + cols_) % cols_;
                const auto& b = buckets_[std::size_t(i) * cols_ + j];
                cand.insert(cand.end(), b.begin(), b.end());
            }
        }
    }

    const std::vector<Vec3>& pts_;
    int rows_ = 0, cols_ = 0;
    std::vector<std::vector<int>> buckets_;
};

// Solves the 6x6 normal equations of the distance-weighted quadratic fit;
// returns the fitted value at the expansion center (the constant coefficient).
double quadratic_fit_at_center(const std::vector<double>& du, const std::vector<double>& dv,
                               const std::vector<double>& wgt, const std::vector<double>& f) {
    constexpr int m = 6;
    double A[m][m] = {};
    double b[m] = {};
    double scale = 0.0;
    for (std::size_t s = 0; s < f.size(); ++s) scale = std::max(scale, du[s] * du[s] + dv[s] * dv[s]);
    const double h = std::sqrt(std::max(scale, 1e-30));
    for (std::size_t s = 0; s < f.size(); ++s) {
        const double x = du[s] / h, y = dv[s] / h;
        const double row[m] = {1.0, x, y, x * x, x * y, y * y};
        for (int i = 0; i < m; ++i) {
            b[i] += wgt[s] * row[i] * f[s];
            for (int j = i; j < m; ++j) A[i][j] += wgt[s] * row[i] * row[j];
        }
    }
    for (int i = 1; i < m; ++i)
        for (int j = 0; j < i; ++j) A[i][j] = A[j][i];

    const double diag_scale = A[0][0];
    auto weighted_mean = [&] {
        double num = 0.0, den = 0.0;
        for (std::size_t s = 0; s < f.size(); ++s) {
            num += wgt[s] * f[s];
            den += wgt[s];
        }
        return den > 0.0 ? num / den : (f.empty() ? 0.0 : f[0]);
    };

    // Gaussian elimination with partial pivoting; a near-singular stencil
    // (weight-starved or collinear neighbors) falls back to the local mean.
    for (int col = 0; col < m; ++col) {
        int best = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[best][col])) best = r;
        if (best != col) {
            for (int j = 0; j < m; ++j) std::swap(A[col][j], A[best][j]);
            std::swap(b[col], b[best]);
        }
        const double d = A[col][col];
        if (std::abs(d) < 1e-10 * diag_scale) return weighted_mean();
        for (int r = col + 1; r < m; ++r) {
            const double fac = A[r][col] / d;
            for (int j = col; j < m; ++j) A[r][j] -= fac * A[col][j];
            b[r] -= fac * b[col];
        }
    }
    double x[m];
    for (int i = m - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < m; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x[0];
}

}  // namespace

std::vector<Vec3> bve_velocity(const BveState& state, const TraversalConfig& config) {
    return biot_savart_velocity(state.positions, state.zeta, state.areas, config);
}

void bve_remesh(BveState& state, int neighbors) {
    const std::size_t n = state.positions.size();
    const int k = std::min<int>(std::max(neighbors, 6), int(n));
    SphereBuckets buckets(state.positions);

    std::vector<double> new_zeta(n), new_tracer;
    const bool with_tracer = !state.tracer.empty();
    if (with_tracer) new_tracer.resize(n);

#pragma omp parallel
    {
        std::vector<int> nbr;
        std::vector<double> du, dv, wgt, fz, ft;
#pragma omp for schedule(static)
        for (long long i = 0; i < (long long)n; ++i) {
            const Vec3 g = state.grid_centers[i];
            const FaceCoords fc = face_project(g);
            buckets.knn(g, k, nbr);
            du.clear(); dv.clear(); wgt.clear(); fz.clear(); ft.clear();
            for (int j : nbr) {
                double X, Y;
                if (!face_plane_coords(fc.face, state.positions[j], X, Y)) continue;
                du.push_back(std::atan(X) - fc.xi);
                dv.push_back(std::atan(Y) - fc.eta);
                fz.push_back(state.zeta[j]);
                if (with_tracer) ft.push_back(state.tracer[j]);
            }
            if (fz.size() < 6) {  // not enough usable neighbors, keep nearest value
                new_zeta[i] = nbr.empty() ? state.zeta[i] : state.zeta[nbr[0]];
                if (with_tracer) new_tracer[i] = nbr.empty() ? state.tracer[i] : state.tracer[nbr[0]];
                continue;
            }
            // Gaussian distance weights scaled by the median neighbor spread
            double d0 = 0.0;
            for (std::size_t s = 0; s < du.size(); ++s)
                d0 = std::max(d0, du[s] * du[s] + dv[s] * dv[s]);
            d0 = std::max(d0, 1e-30);
            for (std::size_t s = 0; s < du.size(); ++s)
                wgt.push_back(std::exp(-4.0 * (du[s] * du[s] + dv[s] * dv[s]) / d0));
            new_zeta[i] = quadratic_fit_at_center(du, dv, wgt, fz);
            if (with_tracer) new_tracer[i] = quadratic_fit_at_center(du, dv, wgt, ft);
        }
    }

    state.positions = state.grid_centers;
    state.zeta = std::move(new_zeta);
    if (with_tracer) state.tracer = std::move(new_tracer);
}

void bve_step(BveState& state, double dt, const BveStepOptions& options) {
    if (dt <= 0.0) throw std::invalid_argument("time step must be positive");
    const std::size_t n = state.positions.size();

    auto stage = [&](const std::vector<Vec3>& pos, const std::vector<double>& zeta) {
        return biot_savart_velocity(pos, zeta, state.areas, options.traversal);
    };
    auto advance = [&](const std::vector<Vec3>& k_pos, double h, std::vector<Vec3>& pos,
                       std::vector<double>& zeta) {
        for (std::size_t i = 0; i < n; ++i) {
            pos[i] = normalized(state.positions[i] + h * k_pos[i]);
            zeta[i] = state.zeta[i] - 2.0 * state.omega * h * k_pos[i].z;
        }
    };

    std::vector<Vec3> pos(n);
    std::vector<double> zeta(n);

    const std::vector<Vec3> k1 = stage(state.positions, state.zeta);
    advance(k1, 0.5 * dt, pos, zeta);
    const std::vector<Vec3> k2 = stage(pos, zeta);
    advance(k2, 0.5 * dt, pos, zeta);
    const std::vector<Vec3> k3 = stage(pos, zeta);
    advance(k3, dt, pos, zeta);
    const std::vector<Vec3> k4 = stage(pos, zeta);

    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 du = (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        state.positions[i] = normalized(state.positions[i] + du);
        state.zeta[i] -= 2.0 * state.omega * du.z;
    }
    state.time += dt;

    if (options.remesh) bve_remesh(state, options.remesh_neighbors);
}

double bve_zeta_error(const BveState& state) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < state.positions.size(); ++i) {
        const double ref = rossby_haurwitz_zeta(state.positions[i]);
        const double diff = state.zeta[i] - ref;
        num += diff * diff * state.areas[i];
        den += ref * ref * state.areas[i];
    }
    return std::sqrt(num / den);
}

}  // namespace csfs
