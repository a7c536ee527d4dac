#pragma once

#include <string>
#include <vector>

#include "csfs/geometry.hpp"
#include "csfs/kernels.hpp"
#include "csfs/summation.hpp"

namespace csfs {

/// Orthonormal real spherical harmonic Y_{l,m} (Condon-Shortley free),
/// cos(m*lon) branch for m >= 0 and sin(|m|*lon) for m < 0.
double real_sph_harm(int l, int m, const Vec3& p);

/// Global relative l2-error ( sum (phi1-phi2)^2 A / sum phi_exact^2 A )^(1/2).
/// Vector fields compare componentwise with the area weight shared across
/// components. Throws std::invalid_argument on length mismatch or an
/// identically zero reference.
double relative_l2_error(const std::vector<double>& phi1, const std::vector<double>& phi2,
                         const std::vector<double>& phi_exact, const std::vector<double>& areas,
                         int out_dim = 1);

/// Least-squares slope of log(y) against log(x); needs at least two points.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// A scalar sample per point of a sphere partition (structured or imported).
struct ScalarFieldOnGrid {
    std::vector<Vec3> points;
    std::vector<double> areas;
    std::vector<double> values;

    std::size_t size() const { return points.size(); }
};

struct SolveReport {
    double input_mean = 0.0;
    bool mean_warning = false;  // Laplace data should have (near-)zero mean
    SumStats sum;
};

/// Green's-function solve phi(x_i) = sum_j G(x_i, x_j) f(x_j) A_j for the
/// Laplace or biharmonic kernel, via the method in `config`.
ScalarFieldOnGrid solve_greens(const ScalarFieldOnGrid& field, const Kernel& kernel,
                               const TraversalConfig& config, SolveReport* report = nullptr);

/// SAL convolution eta_sal(x_i) = sum_j G_SAL(x_i, x_j) eta(x_j) A_j.
/// Throws std::invalid_argument when areas are missing.
ScalarFieldOnGrid sal_potential(const ScalarFieldOnGrid& ssh, const SalParams& params,
                                const TraversalConfig& config, SumStats* stats = nullptr);

enum class BveInit { RossbyHaurwitz, GaussianVortex };

/// Lagrangian particle state of the barotropic vorticity equation. Angles in
/// radians, time in days, vorticity in 1/day; areas are frozen at the initial
/// grid cell areas and grid_centers keeps the undeformed centers remeshing
/// maps back onto.
struct BveState {
    std::vector<Vec3> positions;
    std::vector<double> zeta;
    std::vector<double> tracer;  // empty unless tracking a passive tracer
    std::vector<double> areas;
    std::vector<Vec3> grid_centers;
    double omega = 2.0 * 3.14159265358979323846;  // rotation rate, 2*pi/day
    double time = 0.0;
};

/// Rossby-Haurwitz: zeta0 = (2*pi/7) sin(lat) + 30 sin(lat) cos^4(lat) cos(4 lon),
/// stationary under Omega = 2*pi/day. Gaussian vortex:
/// zeta0 = 4*pi exp(-16 |x-xc|^2) - 0.196353 with xc at latitude pi/20, longitude 0.
BveState bve_initial(BveInit kind, const SphericalGrid& grid, bool with_tracer = false);

/// Rossby-Haurwitz initial vorticity at one point.
double rossby_haurwitz_zeta(const Vec3& p);

/// Biot-Savart particle velocities dx_i/dt = sum_j K_BS(x_i, x_j) zeta_j A_j.
std::vector<Vec3> bve_velocity(const BveState& state, const TraversalConfig& config);

struct BveStepOptions {
    TraversalConfig traversal;
    bool remesh = true;
    int remesh_neighbors = 12;
};

/// One RK4 step of the particle ODEs with positions renormalized to the sphere
/// after every stage; the vorticity update is tied to the stage z-velocities so
/// zeta + 2 Omega z is conserved up to the integrator error. Remeshing (when
/// enabled) then interpolates vorticity and tracer back to the grid centers.
void bve_step(BveState& state, double dt, const BveStepOptions& options);

/// Scattered-data remesh: for every grid center, fit a 6-term quadratic in the
/// center's face-local (xi, eta) over the nearest deformed particles by least
/// squares and evaluate it at the center. Positions return to grid_centers.
void bve_remesh(BveState& state, int neighbors = 12);

/// Vorticity error E_zeta(t) of a stationary reference field.
double bve_zeta_error(const BveState& state);

}  // namespace csfs
