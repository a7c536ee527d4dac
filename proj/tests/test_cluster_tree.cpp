#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "csfs/cluster_tree.hpp"

using namespace csfs;

namespace {

constexpr double kPi = 3.14159265358979323846;

ParticleSet grid_particles(GridKind kind, int level) {
    const SphericalGrid g = build_grid(kind, level);
    ParticleSet p;
    p.positions = g.centers;
    p.weights.assign(g.size(), 0.0);
    return p;
}

std::vector<double> random_weights(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(n);
    for (double& v : w) v = u(rng);
    return w;
}

// Direct per-cluster proxy weights over the cluster's own particles,
// independent of the hierarchical path.
std::vector<double> proxy_weights_direct(const ClusterTree& tree, const Cluster& c,
                                         const std::vector<double>& w_tree_order) {
    const int np = tree.degree + 1;
    std::vector<double> pw(std::size_t(np) * np, 0.0), lx(np), ly(np);
    for (int t = c.begin; t < c.end; ++t) {
        bary_basis_1d(tree.cheb, c.interp.ref_xi(tree.xi[t]), lx.data());
        bary_basis_1d(tree.cheb, c.interp.ref_eta(tree.eta[t]), ly.data());
        for (int k1 = 0; k1 < np; ++k1)
            for (int k2 = 0; k2 < np; ++k2) pw[k1 * np + k2] += w_tree_order[t] * lx[k1] * ly[k2];
    }
    return pw;
}

}  // namespace

TEST_CASE("single populated face yields one leaf root") {
    ParticleSet p;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int i = 0; i < 16; ++i) p.positions.push_back(face_unproject(2, u(rng), u(rng)));
    p.weights.assign(16, 1.0);
    const ClusterTree tree(p, 4, 16, true);
    REQUIRE(tree.clusters.size() >= 6);
    CHECK(tree.clusters[2].count() == 16);
    CHECK(tree.clusters[2].is_leaf());
    for (int f : {0, 1, 3, 4, 5}) CHECK(tree.clusters[f].count() == 0);
}

TEST_CASE("level-4 cubed sphere grid with N0 = 144 splits every root") {
    const ParticleSet p = grid_particles(GridKind::CubedSphere, 4);
    REQUIRE(p.size() == 1536);
    const ClusterTree tree(p, 6, 144, true);
    for (int f = 0; f < 6; ++f) {
        CHECK(tree.clusters[f].count() == 256);
        CHECK_FALSE(tree.clusters[f].is_leaf());
    }
}

TEST_CASE("leaves partition the particles and respect N0") {
    const ParticleSet p = grid_particles(GridKind::Icosahedral, 3);
    const ClusterTree tree(p, 4, 30, true);
    std::vector<int> seen(p.size(), 0);
    for (const Cluster& c : tree.clusters) {
        if (!c.is_leaf()) continue;
        CHECK(c.count() <= 30);
        for (int t = c.begin; t < c.end; ++t) ++seen[tree.perm[t]];
    }
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("children partition the parent range and stay inside it") {
    const ParticleSet p = grid_particles(GridKind::Icosahedral, 3);
    const ClusterTree tree(p, 4, 30, true);
    for (const Cluster& c : tree.clusters) {
        if (c.is_leaf()) continue;
        int covered = 0;
        for (int q = 0; q < c.child_count; ++q) {
            const Cluster& ch = tree.clusters[c.children[q]];
            CHECK(ch.begin >= c.begin);
            CHECK(ch.end <= c.end);
            covered += ch.count();
        }
        CHECK(covered == c.count());
    }
}

TEST_CASE("cluster radius covers every contained particle") {
    const ParticleSet p = grid_particles(GridKind::CubedSphere, 3);
    for (bool shrink : {false, true}) {
        const ClusterTree tree(p, 4, 25, shrink);
        for (const Cluster& c : tree.clusters)
            for (int t = c.begin; t < c.end; ++t)
                CHECK(chordal_distance(c.center, tree.points[t]) <= c.radius + 1e-14);
    }
}

TEST_CASE("shrinking never enlarges the root radius") {
    const ParticleSet p = grid_particles(GridKind::Icosahedral, 3);
    const ClusterTree full(p, 4, 50, false);
    const ClusterTree tight(p, 4, 50, true);
    for (int f = 0; f < 6; ++f) {
        CHECK(tight.clusters[f].count() == full.clusters[f].count());
        CHECK(tight.clusters[f].radius <= full.clusters[f].radius + 1e-14);
    }
}

TEST_CASE("tree build is deterministic") {
    const ParticleSet p = grid_particles(GridKind::LatLon, 4);
    const ClusterTree a(p, 5, 60, true);
    const ClusterTree b(p, 5, 60, true);
    REQUIRE(a.clusters.size() == b.clusters.size());
    CHECK(a.perm == b.perm);
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
        CHECK(a.clusters[i].begin == b.clusters[i].begin);
        CHECK(a.clusters[i].end == b.clusters[i].end);
        CHECK(a.clusters[i].face == b.clusters[i].face);
        CHECK(a.clusters[i].bounds.xi0 == b.clusters[i].bounds.xi0);
        CHECK(a.clusters[i].radius == b.clusters[i].radius);
        CHECK(a.clusters[i].child_count == b.clusters[i].child_count);
    }
}

TEST_CASE("empty particle set is rejected") {
    ParticleSet p;
    CHECK_THROWS_AS(ClusterTree(p, 4, 16, true), std::invalid_argument);
}

TEST_CASE("upward pass: one particle at a proxy node gives the indicator") {
    const int n = 4;
    const ChebyshevGrid1D cheb(n);
    // place the particle at the root face square's tensor node (k1, k2) = (1, 3)
    const double half = kPi / 4.0;
    const double xi = half * cheb.nodes[1], eta = half * cheb.nodes[3];
    ParticleSet p;
    p.positions = {face_unproject(0, xi, eta)};
    p.weights = {1.0};
    ClusterTree tree(p, n, 8, false);
    upward_pass(tree, p.weights);
    const Cluster& root = tree.clusters[0];
    for (int k1 = 0; k1 <= n; ++k1)
        for (int k2 = 0; k2 <= n; ++k2)
            CHECK(root.proxy_weights[k1 * (n + 1) + k2] ==
                  doctest::Approx(k1 == 1 && k2 == 3 ? 1.0 : 0.0).epsilon(1e-13));
}

TEST_CASE("upward pass conserves total weight on every cluster") {
    const ParticleSet base = grid_particles(GridKind::Icosahedral, 3);
    const std::vector<double> w = random_weights(base.size(), 1234);
    ClusterTree tree(base, 6, 40, true);
    upward_pass(tree, w);
    for (const Cluster& c : tree.clusters) {
        double direct = 0.0;
        for (int t = c.begin; t < c.end; ++t) direct += w[tree.perm[t]];
        double hier = 0.0;
        for (double v : c.proxy_weights) hier += v;
        CHECK(hier == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("hierarchical proxy weights match the direct per-cluster formula") {
    const ParticleSet base = grid_particles(GridKind::Icosahedral, 3);
    const std::vector<double> w = random_weights(base.size(), 991);
    ClusterTree tree(base, 6, 40, true);
    upward_pass(tree, w);
    std::vector<double> w_tree(w.size());
    for (std::size_t t = 0; t < w.size(); ++t) w_tree[t] = w[tree.perm[t]];
    double worst = 0.0;
    for (const Cluster& c : tree.clusters) {
        const std::vector<double> direct = proxy_weights_direct(tree, c, w_tree);
        for (std::size_t k = 0; k < direct.size(); ++k)
            worst = std::max(worst, std::abs(direct[k] - c.proxy_weights[k]));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("upward pass is linear in the weights") {
    const ParticleSet base = grid_particles(GridKind::CubedSphere, 3);
    const std::vector<double> u = random_weights(base.size(), 7);
    const std::vector<double> v = random_weights(base.size(), 8);
    std::vector<double> mix(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) mix[i] = 2.5 * u[i] - 1.25 * v[i];

    ClusterTree tu(base, 5, 30, true), tv(base, 5, 30, true), tm(base, 5, 30, true);
    upward_pass(tu, u);
    upward_pass(tv, v);
    upward_pass(tm, mix);
    for (std::size_t c = 0; c < tm.clusters.size(); ++c)
        for (std::size_t k = 0; k < tm.clusters[c].proxy_weights.size(); ++k) {
            const double expect =
                2.5 * tu.clusters[c].proxy_weights[k] - 1.25 * tv.clusters[c].proxy_weights[k];
            CHECK(tm.clusters[c].proxy_weights[k] ==
                  doctest::Approx(expect).epsilon(1e-12).scale(1.0));
        }
}

TEST_CASE("downward pass: zero potentials give zero output") {
    const ParticleSet base = grid_particles(GridKind::Icosahedral, 2);
    ClusterTree tree(base, 4, 20, true);
    clear_proxy_potentials(tree, 1);
    std::vector<double> out(base.size(), 0.0);
    downward_pass(tree, 1, out);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("downward pass: potentials on one leaf reach only its particles") {
    const ParticleSet base = grid_particles(GridKind::Icosahedral, 2);
    ClusterTree tree(base, 4, 20, true);
    clear_proxy_potentials(tree, 1);
    int leaf_id = -1;
    for (int i = 0; i < int(tree.clusters.size()); ++i)
        if (tree.clusters[i].is_leaf() && tree.clusters[i].count() > 4) leaf_id = i;
    REQUIRE(leaf_id >= 0);
    Cluster& leaf = tree.clusters[leaf_id];
    const std::vector<double> phi = random_weights(leaf.proxy_potentials.size(), 55);
    leaf.proxy_potentials = phi;

    std::vector<double> out(base.size(), 0.0);
    downward_pass(tree, 1, out);

    const int np = tree.degree + 1;
    std::vector<double> lx(np), ly(np);
    std::vector<char> inside(base.size(), 0);
    for (int t = leaf.begin; t < leaf.end; ++t) {
        inside[tree.perm[t]] = 1;
        bary_basis_1d(tree.cheb, leaf.interp.ref_xi(tree.xi[t]), lx.data());
        bary_basis_1d(tree.cheb, leaf.interp.ref_eta(tree.eta[t]), ly.data());
        double expect = 0.0;
        for (int k1 = 0; k1 < np; ++k1)
            for (int k2 = 0; k2 < np; ++k2) expect += phi[k1 * np + k2] * lx[k1] * ly[k2];
        CHECK(out[tree.perm[t]] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
    for (std::size_t i = 0; i < base.size(); ++i)
        if (!inside[i]) CHECK(out[i] == 0.0);
}

TEST_CASE("downward pass through levels equals direct root interpolation") {
    const ParticleSet base = grid_particles(GridKind::Icosahedral, 3);
    ClusterTree tree(base, 6, 12, true);
    REQUIRE(tree.levels.size() >= 3);
    clear_proxy_potentials(tree, 1);
    const int np = tree.degree + 1;
    for (int f = 0; f < 6; ++f)
        tree.clusters[f].proxy_potentials = random_weights(std::size_t(np) * np, 100 + f);

    // keep copies: downward reuses the buffers
    std::vector<std::vector<double>> root_phi;
    for (int f = 0; f < 6; ++f) root_phi.push_back(tree.clusters[f].proxy_potentials);

    std::vector<double> out(base.size(), 0.0);
    downward_pass(tree, 1, out);

    std::vector<double> lx(np), ly(np);
    double worst = 0.0;
    for (int f = 0; f < 6; ++f) {
        const Cluster& root = tree.clusters[f];
        for (int t = root.begin; t < root.end; ++t) {
            bary_basis_1d(tree.cheb, root.interp.ref_xi(tree.xi[t]), lx.data());
            bary_basis_1d(tree.cheb, root.interp.ref_eta(tree.eta[t]), ly.data());
            double expect = 0.0;
            for (int k1 = 0; k1 < np; ++k1)
                for (int k2 = 0; k2 < np; ++k2)
                    expect += root_phi[f][k1 * np + k2] * lx[k1] * ly[k2];
            worst = std::max(worst, std::abs(out[tree.perm[t]] - expect));
        }
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("tree stats are coherent") {
    const ParticleSet base = grid_particles(GridKind::Icosahedral, 3);
    const ClusterTree tree(base, 4, 30, true);
    const TreeStats s = tree.stats();
    CHECK(s.cluster_count == int(tree.clusters.size()));
    CHECK(s.depth == int(tree.levels.size()) - 1);
    int total = 0;
    for (std::size_t size = 0; size < s.leaf_size_histogram.size(); ++size)
        total += s.leaf_size_histogram[size] * int(size);
    CHECK(total == int(base.size()));
}
