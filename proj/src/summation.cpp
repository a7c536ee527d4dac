#include "csfs/summation.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csfs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct LaplaceOp {
    static constexpr int dim = 1;
    bool operator()(const Vec3& x, const Vec3& y, double* out) const {
        const double omc = 1.0 - dot(x, y);
        if (omc < kCoincidenceTol) return false;
        out[0] = -std::log(omc) * kInv4Pi;
        return true;
    }
};

struct BiharmonicOp {
    static constexpr int dim = 1;
    bool operator()(const Vec3& x, const Vec3& y, double* out) const {
        out[0] = dilog(std::min(1.0, 0.5 * (1.0 + dot(x, y)))) * kInv4Pi;
        return true;
    }
};

struct BiotSavartOp {
    static constexpr int dim = 3;
    bool operator()(const Vec3& x, const Vec3& y, double* out) const {
        const double omc = 1.0 - dot(x, y);
        if (omc < kCoincidenceTol) return false;
        const double s = -kInv4Pi / omc;
        const Vec3 v = cross(x, y);
        out[0] = s * v.x;
        out[1] = s * v.y;
        out[2] = s * v.z;
        return true;
    }
};

struct SalOp {
    static constexpr int dim = 1;
    double pref, c1, c2;
    explicit SalOp(const SalParams& p)
        : pref(3.0 * p.rho_ratio * kInv4Pi), c1(1.0 - p.b0), c2(p.a1 - p.b1) {}
    bool operator()(const Vec3& x, const Vec3& y, double* out) const {
        const double omc = 1.0 - dot(x, y);
        if (omc < kCoincidenceTol) return false;
        const double gamma = std::sqrt(2.0 * omc);
        const double s = 0.5 * gamma;
        out[0] = pref * (c1 / gamma - c2 * std::log(s * (1.0 + s)));
        return true;
    }
};

template <class F>
decltype(auto) with_kernel(const Kernel& kernel, F&& f) {
    switch (kernel.kind) {
        case KernelKind::Laplace: return f(LaplaceOp{});
        case KernelKind::Biharmonic: return f(BiharmonicOp{});
        case KernelKind::BiotSavart: return f(BiotSavartOp{});
        default: return f(SalOp{kernel.sal});
    }
}

// Interaction list entries regrouped per target cluster so each cluster's
// outputs are owned by one worker and accumulated in traversal order.
std::vector<std::vector<int>> group_by_target(const std::vector<std::pair<int, int>>& list,
                                              std::size_t n_clusters) {
    std::vector<std::vector<int>> groups(n_clusters);
    for (int e = 0; e < int(list.size()); ++e) groups[list[e].first].push_back(e);
    return groups;
}

std::vector<double> permute_weights(const ClusterTree& tree, const std::vector<double>& weights) {
    if (weights.size() != tree.particle_count())
        throw std::invalid_argument("weight count does not match particle count");
    std::vector<double> w(weights.size());
    for (std::size_t t = 0; t < w.size(); ++t) w[t] = weights[tree.perm[t]];
    return w;
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::Direct: return "direct";
        case Method::Cstc: return "cstc";
        default: return "csfmm";
    }
}

Method parse_method(const std::string& name) {
    if (name == "direct") return Method::Direct;
    if (name == "cstc") return Method::Cstc;
    if (name == "csfmm") return Method::Csfmm;
    throw std::invalid_argument("unknown method: " + name);
}

bool well_separated(const Vec3& c0, double r0, const Vec3& c1, double r1, double mac) {
    const double R = chordal_distance(c0, c1);
    return R > 0.0 && r0 + r1 < mac * R;
}

bool well_separated_pc(const Vec3& target, const Cluster& cluster, double mac) {
    return well_separated(target, 0.0, cluster.center, cluster.radius, mac);
}

bool well_separated_cc(const Cluster& ct, const Cluster& cs, double mac) {
    return well_separated(ct.center, ct.radius, cs.center, cs.radius, mac);
}

PotentialField direct_sum(const ParticleSet& targets, const ParticleSet& sources,
                          const Kernel& kernel, int threads) {
    if (sources.weights.size() != sources.positions.size())
        throw std::invalid_argument("source weights and positions differ in length");
    PotentialField field;
    field.out_dim = kernel.out_dim();
    field.values.assign(targets.size() * field.out_dim, 0.0);
    const int nt = resolve_threads(threads);
    with_kernel(kernel, [&](auto op) {
        constexpr int dim = decltype(op)::dim;
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long long i = 0; i < (long long)targets.size(); ++i) {
            const Vec3 xi = targets.positions[i];
            double acc[dim] = {};
            double v[dim];
            for (std::size_t j = 0; j < sources.size(); ++j) {
                if (op(xi, sources.positions[j], v)) {
                    const double w = sources.weights[j];
                    for (int d = 0; d < dim; ++d) acc[d] += w * v[d];
                }
            }
            for (int d = 0; d < dim; ++d) field.values[i * dim + d] = acc[d];
        }
    });
    return field;
}

InteractionLists dual_tree_traversal(const ClusterTree& targets, const ClusterTree& sources,
                                     double mac, int n0) {
    InteractionLists lists;
    std::vector<std::pair<int, int>> stack;
    for (int t = 0; t < 6; ++t)
        for (int s = 0; s < 6; ++s)
            if (targets.clusters[t].count() > 0 && sources.clusters[s].count() > 0)
                stack.emplace_back(t, s);

    while (!stack.empty()) {
        const auto [t, s] = stack.back();
        stack.pop_back();
        const Cluster& ct = targets.clusters[t];
        const Cluster& cs = sources.clusters[s];
        const bool big_t = ct.count() > n0;
        const bool big_s = cs.count() > n0;
        const bool sep = well_separated_cc(ct, cs, mac);

        if (sep && (big_t || big_s)) {
            if (!big_t && big_s) lists.pc.emplace_back(t, s);
            else if (big_t && !big_s) lists.cp.emplace_back(t, s);
            else lists.cc.emplace_back(t, s);
            continue;
        }
        if (!sep && (big_t || big_s)) {
            const bool prefer_source = cs.count() >= ct.count();
            const bool can_s = !cs.is_leaf(), can_t = !ct.is_leaf();
            if (can_s && (prefer_source || !can_t)) {
                for (int q = 0; q < cs.child_count; ++q) stack.emplace_back(t, cs.children[q]);
                continue;
            }
            if (can_t) {
                for (int q = 0; q < ct.child_count; ++q) stack.emplace_back(ct.children[q], s);
                continue;
            }
            // both leaves (possible when a degenerate cluster exceeds n0)
        }
        lists.pp.emplace_back(t, s);
    }
    return lists;
}

void evaluate_pp(const ClusterTree& targets, const ClusterTree& sources,
                 const std::vector<double>& source_weights, const Kernel& kernel,
                 const std::vector<std::pair<int, int>>& list, PotentialField& out, int threads) {
    const std::vector<double> w = permute_weights(sources, source_weights);
    const auto groups = group_by_target(list, targets.clusters.size());
    const int nt = resolve_threads(threads);
    with_kernel(kernel, [&](auto op) {
        constexpr int dim = decltype(op)::dim;
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
        for (long long g = 0; g < (long long)groups.size(); ++g) {
            if (groups[g].empty()) continue;
            const Cluster& ct = targets.clusters[g];
            for (int i = ct.begin; i < ct.end; ++i) {
                const Vec3 xi = targets.points[i];
                double* dst = out.at(targets.perm[i]);
                double acc[dim] = {};
                double v[dim];
                for (int e : groups[g]) {
                    const Cluster& cs = sources.clusters[list[e].second];
                    for (int j = cs.begin; j < cs.end; ++j) {
                        if (op(xi, sources.points[j], v))
                            for (int d = 0; d < dim; ++d) acc[d] += w[j] * v[d];
                    }
                }
                for (int d = 0; d < dim; ++d) dst[d] += acc[d];
            }
        }
    });
}

void evaluate_pc(const ClusterTree& targets, const ClusterTree& sources, const Kernel& kernel,
                 const std::vector<std::pair<int, int>>& list, PotentialField& out, int threads) {
    const auto groups = group_by_target(list, targets.clusters.size());
    const int np = sources.degree + 1;
    const int npp = np * np;
    const int nt = resolve_threads(threads);
    with_kernel(kernel, [&](auto op) {
        constexpr int dim = decltype(op)::dim;
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
        for (long long g = 0; g < (long long)groups.size(); ++g) {
            if (groups[g].empty()) continue;
            const Cluster& ct = targets.clusters[g];
            for (int i = ct.begin; i < ct.end; ++i) {
                const Vec3 xi = targets.points[i];
                double* dst = out.at(targets.perm[i]);
                double acc[dim] = {};
                double v[dim];
                for (int e : groups[g]) {
                    const Cluster& cs = sources.clusters[list[e].second];
                    const double* pw = cs.proxy_weights.data();
                    for (int k = 0; k < npp; ++k) {
                        if (op(xi, cs.interp.proxy_points[k], v))
                            for (int d = 0; d < dim; ++d) acc[d] += pw[k] * v[d];
                    }
                }
                for (int d = 0; d < dim; ++d) dst[d] += acc[d];
            }
        }
    });
}

void accumulate_cp_cc(ClusterTree& targets, const ClusterTree& sources,
                      const std::vector<double>& source_weights, const Kernel& kernel,
                      const std::vector<std::pair<int, int>>& cp,
                      const std::vector<std::pair<int, int>>& cc, int threads) {
    const std::vector<double> w = permute_weights(sources, source_weights);
    const auto cp_groups = group_by_target(cp, targets.clusters.size());
    const auto cc_groups = group_by_target(cc, targets.clusters.size());
    const int np = targets.degree + 1;
    const int npp = np * np;
    const int nt = resolve_threads(threads);
    with_kernel(kernel, [&](auto op) {
        constexpr int dim = decltype(op)::dim;
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
        for (long long g = 0; g < (long long)targets.clusters.size(); ++g) {
            if (cp_groups[g].empty() && cc_groups[g].empty()) continue;
            Cluster& ct = targets.clusters[g];
            double* phi = ct.proxy_potentials.data();
            double v[dim];
            for (int m = 0; m < npp; ++m) {
                const Vec3 tm = ct.interp.proxy_points[m];
                double acc[dim] = {};
                for (int e : cp_groups[g]) {
                    const Cluster& cs = sources.clusters[cp[e].second];
                    for (int j = cs.begin; j < cs.end; ++j) {
                        if (op(tm, sources.points[j], v))
                            for (int d = 0; d < dim; ++d) acc[d] += w[j] * v[d];
                    }
                }
                for (int e : cc_groups[g]) {
                    const Cluster& cs = sources.clusters[cc[e].second];
                    const double* pw = cs.proxy_weights.data();
                    for (int k = 0; k < npp; ++k) {
                        if (op(tm, cs.interp.proxy_points[k], v))
                            for (int d = 0; d < dim; ++d) acc[d] += pw[k] * v[d];
                    }
                }
                for (int d = 0; d < dim; ++d) phi[std::size_t(m) * dim + d] += acc[d];
            }
        }
    });
}

PotentialField cstc_sum(const ParticleSet& targets, const ParticleSet& sources,
                        const Kernel& kernel, const TraversalConfig& config, SumStats* stats) {
    const double t0 = now_seconds();
    const int n0 = config.resolved_n0();
    ClusterTree stree(sources, config.degree, n0, config.shrink);
    const double t1 = now_seconds();
    upward_pass(stree, sources.weights);
    const double t2 = now_seconds();

    PotentialField field;
    field.out_dim = kernel.out_dim();
    field.values.assign(targets.size() * field.out_dim, 0.0);
    const std::vector<double> w = permute_weights(stree, sources.weights);
    const int np = config.degree + 1;
    const int npp = np * np;
    const int nt = resolve_threads(config.threads);
    unsigned long long n_pp = 0, n_pc = 0;

    with_kernel(kernel, [&](auto op) {
        constexpr int dim = decltype(op)::dim;
#pragma omp parallel num_threads(nt) reduction(+ : n_pp, n_pc)
        {
            std::vector<int> stack;
#pragma omp for schedule(static)
            for (long long i = 0; i < (long long)targets.size(); ++i) {
                const Vec3 xi = targets.positions[i];
                double acc[dim] = {};
                double v[dim];
                stack.assign({0, 1, 2, 3, 4, 5});
                while (!stack.empty()) {
                    const int s = stack.back();
                    stack.pop_back();
                    const Cluster& cs = stree.clusters[s];
                    if (cs.count() == 0) continue;
                    if (well_separated_pc(xi, cs, config.mac)) {
                        if (cs.count() > n0) {
                            const double* pw = cs.proxy_weights.data();
                            for (int k = 0; k < npp; ++k) {
                                if (op(xi, cs.interp.proxy_points[k], v))
                                    for (int d = 0; d < dim; ++d) acc[d] += pw[k] * v[d];
                            }
                            ++n_pc;
                            continue;
                        }
                    } else if (!cs.is_leaf()) {
                        for (int q = 0; q < cs.child_count; ++q) stack.push_back(cs.children[q]);
                        continue;
                    }
                    // well-separated small cluster, or non-separated leaf
                    for (int j = cs.begin; j < cs.end; ++j) {
                        if (op(xi, stree.points[j], v))
                            for (int d = 0; d < dim; ++d) acc[d] += w[j] * v[d];
                    }
                    ++n_pp;
                }
                for (int d = 0; d < dim; ++d) field.values[i * dim + d] = acc[d];
            }
        }
    });
    const double t3 = now_seconds();

    if (stats) {
        stats->t_tree_build = t1 - t0;
        stats->t_upward = t2 - t1;
        stats->t_traversal = t3 - t2;
        stats->t_downward = 0.0;
        stats->t_total = t3 - t0;
        stats->pp = n_pp;
        stats->pc = n_pc;
        stats->cp = stats->cc = 0;
        stats->source_tree = stree.stats();
    }
    return field;
}

PotentialField csfmm_sum(const ParticleSet& targets, const ParticleSet& sources,
                         const Kernel& kernel, const TraversalConfig& config, SumStats* stats) {
    const double t0 = now_seconds();
    const int n0 = config.resolved_n0();
    ClusterTree ttree(targets, config.degree, n0, config.shrink);
    ClusterTree stree(sources, config.degree, n0, config.shrink);
    const double t1 = now_seconds();
    upward_pass(stree, sources.weights);
    const double t2 = now_seconds();

    PotentialField field;
    field.out_dim = kernel.out_dim();
    field.values.assign(targets.size() * field.out_dim, 0.0);

    const InteractionLists lists = dual_tree_traversal(ttree, stree, config.mac, n0);
    clear_proxy_potentials(ttree, field.out_dim);
    evaluate_pp(ttree, stree, sources.weights, kernel, lists.pp, field, config.threads);
    evaluate_pc(ttree, stree, kernel, lists.pc, field, config.threads);
    accumulate_cp_cc(ttree, stree, sources.weights, kernel, lists.cp, lists.cc, config.threads);
    const double t3 = now_seconds();

    downward_pass(ttree, field.out_dim, field.values);
    const double t4 = now_seconds();

    if (stats) {
        stats->t_tree_build = t1 - t0;
        stats->t_upward = t2 - t1;
        stats->t_traversal = t3 - t2;
        stats->t_downward = t4 - t3;
        stats->t_total = t4 - t0;
        stats->pp = lists.pp.size();
        stats->pc = lists.pc.size();
        stats->cp = lists.cp.size();
        stats->cc = lists.cc.size();
        stats->source_tree = stree.stats();
        stats->target_tree = ttree.stats();
    }
    return field;
}

PotentialField summed_potential(const ParticleSet& targets, const ParticleSet& sources,
                                const Kernel& kernel, const TraversalConfig& config,
                                SumStats* stats) {
    switch (config.method) {
        case Method::Direct: {
            const double t0 = now_seconds();
            PotentialField f = direct_sum(targets, sources, kernel, config.threads);
            if (stats) {
                *stats = SumStats{};
                stats->t_traversal = stats->t_total = now_seconds() - t0;
                stats->pp = targets.size() * sources.size();
            }
            return f;
        }
        case Method::Cstc: return cstc_sum(targets, sources, kernel, config, stats);
        default: return csfmm_sum(targets, sources, kernel, config, stats);
    }
}

}  // namespace csfs
