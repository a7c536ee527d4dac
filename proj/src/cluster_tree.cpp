#include "csfs/cluster_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace csfs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxDepth = 60;
constexpr double kMinExtent = 1e-13;

// Row-major transfer matrix T[k*np+m] = L^parent_k(child node m), the parent
// Lagrange basis evaluated at the child's mapped nodes on one axis.
void transfer_matrix(const ChebyshevGrid1D& cheb, double mid, double half,
                     const std::vector<double>& child_nodes, std::vector<double>& T) {
    const int np = cheb.degree + 1;
    std::vector<double> col(np);
    for (int m = 0; m < np; ++m) {
        const double xhat = half > 0.0 ? (child_nodes[m] - mid) / half : 0.0;
        bary_basis_1d(cheb, xhat, col.data());
        for (int k = 0; k < np; ++k) T[std::size_t(k) * np + m] = col[k];
    }
}

}  // namespace

ClusterTree::ClusterTree(const ParticleSet& particles, int degree_, int n0_, bool shrink)
    : degree(degree_), n0(n0_), shrunk(shrink), cheb(degree_) {
    const std::size_t n = particles.size();
    if (n == 0) throw std::invalid_argument("cannot build a cluster tree from an empty particle set");
    if (n0 < 1) throw std::invalid_argument("maximum leaf size must be at least 1");

    // Assign particles to root faces, stable in input order.
    std::vector<FaceCoords> fc(n);
    for (std::size_t i = 0; i < n; ++i) fc[i] = face_project(particles.positions[i]);
    perm.reserve(n);
    for (int f = 0; f < 6; ++f)
        for (std::size_t i = 0; i < n; ++i)
            if (fc[i].face == f) perm.push_back(int(i));

    points.resize(n);
    xi.resize(n);
    eta.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        points[t] = particles.positions[perm[t]];
        xi[t] = fc[perm[t]].xi;
        eta[t] = fc[perm[t]].eta;
    }

    auto finish_cluster = [&](Cluster& c, const CellRect& assigned) {
        if (shrunk && c.count() > 0) {
            CellRect r{xi[c.begin], xi[c.begin], eta[c.begin], eta[c.begin]};
            for (int t = c.begin + 1; t < c.end; ++t) {
                r.xi0 = std::min(r.xi0, xi[t]);
                r.xi1 = std::max(r.xi1, xi[t]);
                r.eta0 = std::min(r.eta0, eta[t]);
                r.eta1 = std::max(r.eta1, eta[t]);
            }
            c.bounds = r;
        } else {
            c.bounds = assigned;
        }
        c.interp = CellInterpolant(c.face, c.bounds, cheb);
        c.center = face_unproject(c.face, c.interp.xi_mid, c.interp.eta_mid);
        c.radius = 0.0;
        for (int t = c.begin; t < c.end; ++t)
            c.radius = std::max(c.radius, chordal_distance(c.center, points[t]));
    };

    const CellRect face_square{-kPi / 4.0, kPi / 4.0, -kPi / 4.0, kPi / 4.0};
    int cursor = 0;
    for (int f = 0; f < 6; ++f) {
        int count = 0;
        while (cursor + count < int(n) && fc[perm[cursor + count]].face == f) ++count;
        Cluster root;
        root.face = f;
        root.begin = cursor;
        root.end = cursor + count;
        root.depth = 0;
        finish_cluster(root, face_square);
        clusters.push_back(std::move(root));
        cursor += count;
    }

    std::vector<int> stack = {0, 1, 2, 3, 4, 5};
    std::vector<int> tmp_idx;
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const CellRect b = clusters[id].bounds;
        const int begin = clusters[id].begin, end = clusters[id].end;
        const int depth = clusters[id].depth, face = clusters[id].face;
        if (end - begin <= n0 || depth >= kMaxDepth) continue;
        if (std::max(b.xi1 - b.xi0, b.eta1 - b.eta0) < kMinExtent) continue;

        const double mx = 0.5 * (b.xi0 + b.xi1);
        const double my = 0.5 * (b.eta0 + b.eta1);
        auto quadrant = [&](int t) { return (xi[t] >= mx ? 1 : 0) + (eta[t] >= my ? 2 : 0); };

        // Stable 4-way partition of the range.
        tmp_idx.assign(perm.begin() + begin, perm.begin() + end);
        std::vector<Vec3> tmp_pos(points.begin() + begin, points.begin() + end);
        std::vector<double> tmp_xi(xi.begin() + begin, xi.begin() + end);
        std::vector<double> tmp_eta(eta.begin() + begin, eta.begin() + end);
        int counts[4] = {0, 0, 0, 0};
        for (int t = begin; t < end; ++t) ++counts[quadrant(t)];
        int offsets[4], acc = begin;
        for (int q = 0; q < 4; ++q) { offsets[q] = acc; acc += counts[q]; }
        {
            int write[4] = {offsets[0], offsets[1], offsets[2], offsets[3]};
            for (int k = 0; k < end - begin; ++k) {
                const double pxi = tmp_xi[k], peta = tmp_eta[k];
                const int q = (pxi >= mx ? 1 : 0) + (peta >= my ? 2 : 0);
                const int w = write[q]++;
                perm[w] = tmp_idx[k];
                points[w] = tmp_pos[k];
                xi[w] = pxi;
                eta[w] = peta;
            }
        }

        const CellRect quad_rects[4] = {
            {b.xi0, mx, b.eta0, my}, {mx, b.xi1, b.eta0, my},
            {b.xi0, mx, my, b.eta1}, {mx, b.xi1, my, b.eta1}};
        for (int q = 0; q < 4; ++q) {
            if (counts[q] == 0) continue;  // empty children are pruned
            Cluster child;
            child.face = face;
            child.begin = offsets[q];
            child.end = offsets[q] + counts[q];
            child.parent = id;
            child.depth = depth + 1;
            finish_cluster(child, quad_rects[q]);
            const int cid = int(clusters.size());
            clusters.push_back(std::move(child));
            clusters[id].children[clusters[id].child_count++] = cid;
            stack.push_back(cid);
        }
    }

    int max_depth = 0;
    for (const Cluster& c : clusters) max_depth = std::max(max_depth, c.depth);
    levels.assign(max_depth + 1, {});
    for (int id = 0; id < int(clusters.size()); ++id) levels[clusters[id].depth].push_back(id);
}

TreeStats ClusterTree::stats() const {
    TreeStats s;
    s.depth = int(levels.size()) - 1;
    s.cluster_count = int(clusters.size());
    for (const Cluster& c : clusters) {
        if (!c.is_leaf()) continue;
        ++s.leaf_count;
        if (int(s.leaf_size_histogram.size()) <= c.count())
            s.leaf_size_histogram.resize(c.count() + 1, 0);
        ++s.leaf_size_histogram[c.count()];
    }
    return s;
}

void upward_pass(ClusterTree& tree, const std::vector<double>& weights) {
    if (weights.size() != tree.particle_count())
        throw std::invalid_argument("weight count does not match the tree's particle count");
    const int np = tree.degree + 1;
    const std::size_t npp = std::size_t(np) * np;

    std::vector<double> w(tree.particle_count());
    for (std::size_t t = 0; t < w.size(); ++t) w[t] = weights[tree.perm[t]];

    for (Cluster& c : tree.clusters) c.proxy_weights.assign(npp, 0.0);

    for (int level = int(tree.levels.size()) - 1; level >= 0; --level) {
        const std::vector<int>& ids = tree.levels[level];
#pragma omp parallel for schedule(static)
        for (int i = 0; i < int(ids.size()); ++i) {
            Cluster& c = tree.clusters[ids[i]];
            double* pw = c.proxy_weights.data();
            if (c.is_leaf()) {
                std::vector<double> lx(np), ly(np);
                for (int t = c.begin; t < c.end; ++t) {
                    bary_basis_1d(tree.cheb, c.interp.ref_xi(tree.xi[t]), lx.data());
                    bary_basis_1d(tree.cheb, c.interp.ref_eta(tree.eta[t]), ly.data());
                    const double wt = w[t];
                    for (int k1 = 0; k1 < np; ++k1) {
                        const double a = wt * lx[k1];
                        double* row = pw + std::size_t(k1) * np;
                        for (int k2 = 0; k2 < np; ++k2) row[k2] += a * ly[k2];
                    }
                }
            } else {
                std::vector<double> axi(npp), aeta(npp), tmp(npp);
                for (int q = 0; q < c.child_count; ++q) {
                    const Cluster& ch = tree.clusters[c.children[q]];
                    transfer_matrix(tree.cheb, c.interp.xi_mid, c.interp.xi_half,
                                    ch.interp.xi_nodes, axi);
                    transfer_matrix(tree.cheb, c.interp.eta_mid, c.interp.eta_half,
                                    ch.interp.eta_nodes, aeta);
                    const double* cw = ch.proxy_weights.data();
                    // tmp = axi * cw,   pw += tmp * aeta^T
                    for (int k1 = 0; k1 < np; ++k1)
                        for (int m2 = 0; m2 < np; ++m2) {
                            double s = 0.0;
                            for (int m1 = 0; m1 < np; ++m1)
                                s += axi[std::size_t(k1) * np + m1] * cw[std::size_t(m1) * np + m2];
                            tmp[std::size_t(k1) * np + m2] = s;
                        }
                    for (int k1 = 0; k1 < np; ++k1)
                        for (int k2 = 0; k2 < np; ++k2) {
                            double s = 0.0;
                            for (int m2 = 0; m2 < np; ++m2)
                                s += tmp[std::size_t(k1) * np + m2] * aeta[std::size_t(k2) * np + m2];
                            pw[std::size_t(k1) * np + k2] += s;
                        }
                }
            }
        }
    }
}

void clear_proxy_potentials(ClusterTree& tree, int out_dim) {
    const int np = tree.degree + 1;
    const std::size_t size = std::size_t(np) * np * out_dim;
    for (Cluster& c : tree.clusters) c.proxy_potentials.assign(size, 0.0);
}

void downward_pass(ClusterTree& tree, int out_dim, std::vector<double>& out) {
    if (out.size() != tree.particle_count() * std::size_t(out_dim))
        throw std::invalid_argument("output size does not match particle count and out_dim");
    const int np = tree.degree + 1;
    const std::size_t npp = std::size_t(np) * np;

    for (std::size_t level = 0; level < tree.levels.size(); ++level) {
        const std::vector<int>& ids = tree.levels[level];
#pragma omp parallel for schedule(static)
        for (int i = 0; i < int(ids.size()); ++i) {
            Cluster& c = tree.clusters[ids[i]];
            if (c.proxy_potentials.empty()) continue;
            const double* pp = c.proxy_potentials.data();
            if (c.is_leaf()) {
                std::vector<double> lx(np), ly(np);
                for (int t = c.begin; t < c.end; ++t) {
                    bary_basis_1d(tree.cheb, c.interp.ref_xi(tree.xi[t]), lx.data());
                    bary_basis_1d(tree.cheb, c.interp.ref_eta(tree.eta[t]), ly.data());
                    double* dst = out.data() + std::size_t(tree.perm[t]) * out_dim;
                    for (int k1 = 0; k1 < np; ++k1) {
                        const double a = lx[k1];
                        const double* row = pp + std::size_t(k1) * np * out_dim;
                        for (int k2 = 0; k2 < np; ++k2) {
                            const double b = a * ly[k2];
                            for (int d = 0; d < out_dim; ++d) dst[d] += b * row[std::size_t(k2) * out_dim + d];
                        }
                    }
                }
            } else {
                std::vector<double> axi(npp), aeta(npp);
                for (int q = 0; q < c.child_count; ++q) {
                    Cluster& ch = tree.clusters[c.children[q]];
                    transfer_matrix(tree.cheb, c.interp.xi_mid, c.interp.xi_half,
                                    ch.interp.xi_nodes, axi);
                    transfer_matrix(tree.cheb, c.interp.eta_mid, c.interp.eta_half,
                                    ch.interp.eta_nodes, aeta);
                    double* cp = ch.proxy_potentials.data();
                    // cp[n1,n2] += sum_{m1,m2} axi[m1,n1] aeta[m2,n2] pp[m1,m2]
                    for (int n1 = 0; n1 < np; ++n1)
                        for (int n2 = 0; n2 < np; ++n2) {
                            double* dst = cp + (std::size_t(n1) * np + n2) * out_dim;
                            for (int m1 = 0; m1 < np; ++m1) {
                                const double a = axi[std::size_t(m1) * np + n1];
                                const double* row = pp + std::size_t(m1) * np * out_dim;
                                for (int m2 = 0; m2 < np; ++m2) {
                                    const double b = a * aeta[std::size_t(m2) * np + n2];
                                    for (int d = 0; d < out_dim; ++d)
                                        dst[d] += b * row[std::size_t(m2) * out_dim + d];
                                }
                            }
                        }
                }
            }
        }
    }
}

}  // namespace csfs
