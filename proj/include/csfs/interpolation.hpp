#pragma once

#include <vector>

#include "csfs/geometry.hpp"

namespace csfs {

/// Chebyshev points s_k = cos(k*pi/n), k = 0..n, with barycentric weights
/// w_k = (-1)^k (halved at the endpoints). The weights are scale-invariant:
/// the same values serve any interval after the affine map to [-1,1].
struct ChebyshevGrid1D {
    int degree = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit ChebyshevGrid1D(int n);
};

/// All n+1 Lagrange basis values L_k(x) in barycentric form. If x coincides
/// with a node within 1e-14 the exact unit vector is returned, bypassing the
/// singular quotient.
void bary_basis_1d(const ChebyshevGrid1D& grid, double x, double* out);
std::vector<double> bary_basis_1d(const ChebyshevGrid1D& grid, double x);

struct CellRect {
    double xi0 = 0.0, xi1 = 0.0, eta0 = 0.0, eta1 = 0.0;
};

/// Tensor-product interpolant on one cubed-sphere cell. The reference square
/// [-1,1]^2 maps to the (xi,eta) rectangle affinely per axis; proxy points are
/// the mapped tensor Chebyshev points pushed to the sphere.
struct CellInterpolant {
    int face = 0;
    CellRect rect;
    int degree = 0;
    double xi_mid = 0.0, xi_half = 0.0, eta_mid = 0.0, eta_half = 0.0;
    std::vector<double> xi_nodes, eta_nodes;  // mapped nodes, size n+1 each
    std::vector<Vec3> proxy_points;           // (n+1)^2, index k1*(n+1)+k2

    CellInterpolant() = default;
    CellInterpolant(int face, const CellRect& rect, const ChebyshevGrid1D& cheb);

    double ref_xi(double xi) const { return xi_half > 0.0 ? (xi - xi_mid) / xi_half : 0.0; }
    double ref_eta(double eta) const { return eta_half > 0.0 ? (eta - eta_mid) / eta_half : 0.0; }
};

/// Tensor basis L_{k1}(xi_hat) L_{k2}(eta_hat) at a sphere point inside the cell.
/// Throws std::domain_error if p lies outside the cell (1e-12 slack).
std::vector<double> bary_basis_2d(const CellInterpolant& interp, const ChebyshevGrid1D& cheb,
                                  const Vec3& p);

}  // namespace csfs
