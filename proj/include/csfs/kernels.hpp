#pragma once

#include <string>
#include <string_view>

#include "csfs/geometry.hpp"

namespace csfs {

/// Real dilogarithm, dilog(x) = -int_0^x ln(1-t)/t dt for x <= 1.
/// Throws std::domain_error for x > 1.
double dilog(double x);

/// Coefficients of the fitted Load-Love-Number closed form,
/// k'_n ~ a1/n and h'_n ~ b0 + b1/n, plus the seawater/Earth mean density
/// ratio. The density ratio default is 1025/5517; tests that assert values
/// always fix it explicitly.
struct SalParams {
    double a1 = -2.7;
    double b0 = -6.21196;
    double b1 = 6.1;
    double rho_ratio = 1025.0 / 5517.0;
};

enum class KernelKind { Laplace, Biharmonic, BiotSavart, Sal };

/// Coincidence guard on 1 - x.y below which singular kernels refuse to evaluate.
inline constexpr double kCoincidenceTol = 1e-14;

/// Uniform interface over the four interaction kernels. All kernels depend on
/// (x, y) only through x.y (plus x cross y for Biot-Savart).
struct Kernel {
    KernelKind kind = KernelKind::Laplace;
    SalParams sal;

    int out_dim() const { return kind == KernelKind::BiotSavart ? 3 : 1; }
    bool singular_at_coincidence() const { return kind != KernelKind::Biharmonic; }

    /// Writes out_dim() values; throws std::domain_error at coincident points
    /// for singular kernels.
    void eval(const Vec3& x, const Vec3& y, double* out) const;

    /// Guarded form used inside summation loops: returns false (writing
    /// nothing) when a singular kernel hits the coincidence guard.
    bool try_eval(const Vec3& x, const Vec3& y, double* out) const;

    std::string_view name() const;
    static Kernel parse(const std::string& name, const SalParams& sal = {});
};

double eval_laplace(const Vec3& x, const Vec3& y);
double eval_biharmonic(const Vec3& x, const Vec3& y);
Vec3 eval_biot_savart(const Vec3& x, const Vec3& y);
double eval_sal(const Vec3& x, const Vec3& y, const SalParams& params);

}  // namespace csfs
