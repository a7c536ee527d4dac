#include "csfs/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace csfs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPi2Over6 = kPi * kPi / 6.0;

// Power series on the base region |s| <= 1/2.
double dilog_series(double s) {
    double term = s;
    double sum = s;
    for (int k = 2; k < 80; ++k) {
        term *= s;
        const double add = term / double(k * k);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double dilog_impl(double x) {
    if (x == 0.0) return 0.0;
    if (x == 1.0) return kPi2Over6;
    if (x < -1.0) {
        // Li2(x) = -pi^2/6 - ln^2(-x)/2 - Li2(1/x)
        const double l = std::log(-x);
        return -kPi2Over6 - 0.5 * l * l - dilog_impl(1.0 / x);
    }
    if (x < -0.5) {
        // Li2(x) = -ln^2(1-x)/2 - Li2(x/(x-1)), mapped argument in (1/3, 1/2]
        const double l = std::log(1.0 - x);
        return -0.5 * l * l - dilog_impl(x / (x - 1.0));
    }
    if (x > 0.5) {
        // Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x)
        return kPi2Over6 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
    }
    return dilog_series(x);
}

}  // namespace

double dilog(double x) {
    if (x > 1.0) throw std::domain_error("dilog argument must be <= 1");
    return dilog_impl(x);
}

double eval_laplace(const Vec3& x, const Vec3& y) {
    const double omc = 1.0 - dot(x, y);
    if (omc < kCoincidenceTol) throw std::domain_error("Laplace kernel singular at coincident points");
    return -std::log(omc) / (4.0 * kPi);
}

double eval_biharmonic(const Vec3& x, const Vec3& y) {
    // dot of two unit vectors can exceed 1 by an ulp
    return dilog(std::min(1.0, 0.5 * (1.0 + dot(x, y)))) / (4.0 * kPi);
}

Vec3 eval_biot_savart(const Vec3& x, const Vec3& y) {
    const double omc = 1.0 - dot(x, y);
    if (omc < kCoincidenceTol)
        throw std::domain_error("Biot-Savart kernel singular at coincident points");
    const double s = -1.0 / (4.0 * kPi * omc);
    return s * cross(x, y);
}

double eval_sal(const Vec3& x, const Vec3& y, const SalParams& params) {
    const double omc = 1.0 - dot(x, y);
    if (omc < kCoincidenceTol) throw std::domain_error("SAL kernel singular at coincident points");
    const double gamma = std::sqrt(2.0 * omc);
    const double s = 0.5 * gamma;
    return 3.0 * params.rho_ratio / (4.0 * kPi) *
           ((1.0 - params.b0) / gamma - (params.a1 - params.b1) * std::log(s * (1.0 + s)));
}

void Kernel::eval(const Vec3& x, const Vec3& y, double* out) const {
    switch (kind) {
        case KernelKind::Laplace: out[0] = eval_laplace(x, y); return;
        case KernelKind::Biharmonic: out[0] = eval_biharmonic(x, y); return;
        case KernelKind::BiotSavart: {
            const Vec3 v = eval_biot_savart(x, y);
            out[0] = v.x; out[1] = v.y; out[2] = v.z;
            return;
        }
        default: out[0] = eval_sal(x, y, sal); return;
    }
}

bool Kernel::try_eval(const Vec3& x, const Vec3& y, double* out) const {
    if (singular_at_coincidence() && 1.0 - dot(x, y) < kCoincidenceTol) return false;
    eval(x, y, out);
    return true;
}

std::string_view Kernel::name() const {
    switch (kind) {
        case KernelKind::Laplace: return "laplace";
        case KernelKind::Biharmonic: return "biharmonic";
        case KernelKind::BiotSavart: return "biot_savart";
        default: return "sal";
    }
}

Kernel Kernel::parse(const std::string& name, const SalParams& sal) {
    Kernel k;
    k.sal = sal;
    if (name == "laplace") k.kind = KernelKind::Laplace;
    else if (name == "biharmonic") k.kind = KernelKind::Biharmonic;
    else if (name == "biot_savart") k.kind = KernelKind::BiotSavart;
    else if (name == "sal") k.kind = KernelKind::Sal;
    else throw std::invalid_argument("unknown kernel: " + name);
    return k;
}

}  // namespace csfs
