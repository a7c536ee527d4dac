#include "csfs/interpolation.hpp"

#include <cmath>
#include <stdexcept>

namespace csfs {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNodeTol = 1e-14;
constexpr double kCellSlack = 1e-12;
}  // namespace

ChebyshevGrid1D::ChebyshevGrid1D(int n) : degree(n) {
    if (n < 1) throw std::invalid_argument("interpolation degree must be positive");
    nodes.resize(n + 1);
    weights.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        nodes[k] = std::cos(k * kPi / n);
        weights[k] = (k % 2 == 0) ? 1.0 : -1.0;
    }
    weights[0] *= 0.5;
    weights[n] *= 0.5;
}

void bary_basis_1d(const ChebyshevGrid1D& grid, double x, double* out) {
    const int np = grid.degree + 1;
    for (int k = 0; k < np; ++k) {
        if (std::abs(x - grid.nodes[k]) < kNodeTol) {
            for (int j = 0; j < np; ++j) out[j] = 0.0;
            out[k] = 1.0;
            return;
        }
    }
    double denom = 0.0;
    for (int k = 0; k < np; ++k) {
        const double q = grid.weights[k] / (x - grid.nodes[k]);
        out[k] = q;
        denom += q;
    }
    const double inv = 1.0 / denom;
    for (int k = 0; k < np; ++k) out[k] *= inv;
}

std::vector<double> bary_basis_1d(const ChebyshevGrid1D& grid, double x) {
    std::vector<double> out(grid.degree + 1);
    bary_basis_1d(grid, x, out.data());
    return out;
}

CellInterpolant::CellInterpolant(int face_, const CellRect& rect_, const ChebyshevGrid1D& cheb)
    : face(face_), rect(rect_), degree(cheb.degree) {
    xi_mid = 0.5 * (rect.xi0 + rect.xi1);
    xi_half = 0.5 * (rect.xi1 - rect.xi0);
    eta_mid = 0.5 * (rect.eta0 + rect.eta1);
    eta_half = 0.5 * (rect.eta1 - rect.eta0);
    const int np = degree + 1;
    xi_nodes.resize(np);
    eta_nodes.resize(np);
    for (int k = 0; k < np; ++k) {
        xi_nodes[k] = xi_mid + xi_half * cheb.nodes[k];
        eta_nodes[k] = eta_mid + eta_half * cheb.nodes[k];
    }
    proxy_points.resize(std::size_t(np) * np);
    for (int k1 = 0; k1 < np; ++k1)
        for (int k2 = 0; k2 < np; ++k2)
            proxy_points[std::size_t(k1) * np + k2] = face_unproject(face, xi_nodes[k1], eta_nodes[k2]);
}

std::vector<double> bary_basis_2d(const CellInterpolant& interp, const ChebyshevGrid1D& cheb,
                                  const Vec3& p) {
    const FaceCoords fc = face_project(p);
    if (fc.face != interp.face || fc.xi < interp.rect.xi0 - kCellSlack ||
        fc.xi > interp.rect.xi1 + kCellSlack || fc.eta < interp.rect.eta0 - kCellSlack ||
        fc.eta > interp.rect.eta1 + kCellSlack)
        throw std::domain_error("point lies outside the interpolation cell");

    const int np = interp.degree + 1;
    std::vector<double> lx(np), ly(np);
    bary_basis_1d(cheb, interp.ref_xi(fc.xi), lx.data());
    bary_basis_1d(cheb, interp.ref_eta(fc.eta), ly.data());
    std::vector<double> out(std::size_t(np) * np);
    for (int k1 = 0; k1 < np; ++k1)
        for (int k2 = 0; k2 < np; ++k2) out[std::size_t(k1) * np + k2] = lx[k1] * ly[k2];
    return out;
}

}  // namespace csfs
