#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "csfs/geometry.hpp"
#include "csfs/interpolation.hpp"

namespace csfs {

/// Particle positions on the unit sphere with midpoint-rule weights w_j = f(x_j) A_j.
struct ParticleSet {
    std::vector<Vec3> positions;
    std::vector<double> weights;

    std::size_t size() const { return positions.size(); }
};

/// Quadtree node over a cubed-sphere cell. The bounds rectangle is the shrunk
/// bounding box of the contained particles when shrinking is enabled; proxy
/// points, the split midpoint, and the cluster center all use it.
struct Cluster {
    int face = 0;
    CellRect bounds;
    Vec3 center;
    double radius = 0.0;
    int begin = 0, end = 0;  // contiguous range in tree order
    int parent = -1;
    int depth = 0;
    std::array<int, 4> children = {-1, -1, -1, -1};
    int child_count = 0;

    CellInterpolant interp;
    std::vector<double> proxy_weights;     // (n+1)^2, filled by the upward pass
    std::vector<double> proxy_potentials;  // (n+1)^2 * out_dim, CSFMM target side

    int count() const { return end - begin; }
    bool is_leaf() const { return child_count == 0; }
};

struct TreeStats {
    int depth = 0;
    int cluster_count = 0;
    int leaf_count = 0;
    std::vector<int> leaf_size_histogram;  // bucket i counts leaves of size i
};

/// Cubed-sphere quadtree over a particle set. Clusters 0..5 are the six face
/// roots (kept even when empty); particles are permuted so every cluster owns
/// a contiguous index range, with perm mapping tree order to input order.
class ClusterTree {
public:
    ClusterTree(const ParticleSet& particles, int degree, int n0, bool shrink);

    std::vector<Cluster> clusters;
    std::vector<int> perm;                 // tree order -> original index
    std::vector<Vec3> points;              // tree order
    std::vector<double> xi, eta;           // face-local coordinates, tree order
    std::vector<std::vector<int>> levels;  // cluster ids by depth
    int degree = 0;
    int n0 = 0;
    bool shrunk = false;
    ChebyshevGrid1D cheb;

    std::size_t particle_count() const { return points.size(); }
    TreeStats stats() const;
};

/// Proxy weights for every cluster: leaves by direct basis accumulation over
/// their particles, parents by the child-to-parent interpolation transfer.
/// Weights are given in the input (unpermuted) order.
void upward_pass(ClusterTree& tree, const std::vector<double>& weights);

/// Zeroes (and sizes) the proxy potential storage for an accumulation sweep.
void clear_proxy_potentials(ClusterTree& tree, int out_dim);

/// Pushes accumulated proxy potentials down the tree, parents into children,
/// and interpolates leaf proxy potentials to the particles. Adds into `out`
/// (input order, length N * out_dim).
void downward_pass(ClusterTree& tree, int out_dim, std::vector<double>& out);

}  // namespace csfs
