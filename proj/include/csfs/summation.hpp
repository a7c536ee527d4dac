#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csfs/cluster_tree.hpp"
#include "csfs/kernels.hpp"

namespace csfs {

enum class Method { Direct, Cstc, Csfmm };

const char* method_name(Method m);
Method parse_method(const std::string& name);  // throws std::invalid_argument

/// Parameters shared by the fast summation methods. n0 < 0 selects the
/// default maximum leaf size 4n^2. threads == 0 uses all available workers;
/// results are independent of the thread count by construction (each output
/// slot is owned by exactly one worker and accumulated in a fixed order).
struct TraversalConfig {
    Method method = Method::Csfmm;
    double mac = 0.7;
    int degree = 6;
    int n0 = -1;
    bool shrink = true;
    int threads = 0;

    int resolved_n0() const { return n0 >= 0 ? n0 : 4 * degree * degree; }
};

/// Per-target potentials, out_dim values per target, target-major layout.
struct PotentialField {
    int out_dim = 1;
    std::vector<double> values;

    std::size_t size() const { return values.size() / out_dim; }
    double* at(std::size_t i) { return values.data() + i * out_dim; }
    const double* at(std::size_t i) const { return values.data() + i * out_dim; }
};

/// Phase wall times (seconds) and interaction list sizes of one summation run.
struct SumStats {
    double t_tree_build = 0.0;
    double t_upward = 0.0;
    double t_traversal = 0.0;
    double t_downward = 0.0;
    double t_total = 0.0;
    std::size_t pp = 0, pc = 0, cp = 0, cc = 0;  // list entries by type
    TreeStats source_tree;
    TreeStats target_tree;
};

/// Interaction lists from dual tree traversal, pairs of (target cluster id,
/// source cluster id) tagged by type.
struct InteractionLists {
    std::vector<std::pair<int, int>> pp, pc, cp, cc;
};

/// true when r0 + r1 < mac * R with R the chordal center distance (strict;
/// concentric clusters are never well-separated).
bool well_separated(const Vec3& c0, double r0, const Vec3& c1, double r1, double mac);
bool well_separated_pc(const Vec3& target, const Cluster& cluster, double mac);
bool well_separated_cc(const Cluster& ct, const Cluster& cs, double mac);

/// Dual tree traversal (Algorithm 2 control flow): well-separated pairs with a
/// large side are dispatched to PC/CP/CC by cluster size, non-separated pairs
/// recurse into the children of the larger cluster (ties toward the source,
/// leaves fall through to the other side), small-small pairs go to PP.
InteractionLists dual_tree_traversal(const ClusterTree& targets, const ClusterTree& sources,
                                     double mac, int n0);

PotentialField direct_sum(const ParticleSet& targets, const ParticleSet& sources,
                          const Kernel& kernel, int threads = 0);

PotentialField cstc_sum(const ParticleSet& targets, const ParticleSet& sources,
                        const Kernel& kernel, const TraversalConfig& config,
                        SumStats* stats = nullptr);

PotentialField csfmm_sum(const ParticleSet& targets, const ParticleSet& sources,
                         const Kernel& kernel, const TraversalConfig& config,
                         SumStats* stats = nullptr);

/// Dispatch on config.method.
PotentialField summed_potential(const ParticleSet& targets, const ParticleSet& sources,
                                const Kernel& kernel, const TraversalConfig& config,
                                SumStats* stats = nullptr);

/// Pieces of the CSFMM evaluation, exposed so the downward pass can be checked
/// against direct interpolation of accumulated proxy potentials. Source
/// weights are given in input (unpermuted) order; `out` is indexed by the
/// original target order.
void evaluate_pp(const ClusterTree& targets, const ClusterTree& sources,
                 const std::vector<double>& source_weights, const Kernel& kernel,
                 const std::vector<std::pair<int, int>>& list, PotentialField& out, int threads = 0);
void evaluate_pc(const ClusterTree& targets, const ClusterTree& sources, const Kernel& kernel,
                 const std::vector<std::pair<int, int>>& list, PotentialField& out, int threads = 0);
void accumulate_cp_cc(ClusterTree& targets, const ClusterTree& sources,
                      const std::vector<double>& source_weights, const Kernel& kernel,
                      const std::vector<std::pair<int, int>>& cp,
                      const std::vector<std::pair<int, int>>& cc, int threads = 0);

}  // namespace csfs
