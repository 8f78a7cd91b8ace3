#pragma once

#include "ctree/cluster.hpp"

namespace ctree {

struct PruneParams {
    double theta = 0.2;  // prune threshold, >= 0
    double xi = 1.0;     // per-node storage penalty, > 0
};

struct PruneReport {
    int unpruned_count = 0;
    int pruned_count = 0;
    double total_information = 0.0;  // sum over unpruned nodes
    double avg_leaf_hcd = 0.0;       // mean pairwise HCD over surviving leaves
};

/// Storage cost of keeping child `c` under parent `p`: the penalty xi
/// plus the time ranges, coordsets and vertices of `c` that do not
/// appear verbatim in `p`. Coordinate comparisons use a 1e-9 degree
/// tolerance.
double cost(const ContextNode& c, const ContextNode& p, double xi);

/// Sum of durations (seconds), areas (m^2) and tag count. Units are
/// mixed by construction; large areas or durations dominate.
double information(const ContextNode& c);

/// 1 minus the evenly weighted child/parent ratios of duration, area
/// and tag count. A ratio with a zero denominator counts as 1.
double utility(const ContextNode& c, const ContextNode& p);

double cost_benefit(const ContextNode& c, const ContextNode& p, double xi);

/// Depth-first pruning: a non-root node is removed iff all of its
/// children were removed and its cost-benefit score against its parent
/// is below theta. The report is computed on the survivor tree.
std::pair<ContextTree, PruneReport> prune_tree(const ContextTree& tree,
                                               const PruneParams& params,
                                               const Taxonomy& tax);

}  // namespace ctree
