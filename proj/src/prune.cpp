#include "ctree/prune.hpp"

#include <cmath>

namespace ctree {

namespace {

constexpr double kCoordTolDeg = 1e-9;

bool latlng_close(const LatLng& a, const LatLng& b) {
    return std::abs(a.lat - b.lat) <= kCoordTolDeg && std::abs(a.lng - b.lng) <= kCoordTolDeg;
}

bool coordsets_equal(const CoordinateSet& a, const CoordinateSet& b) {
    if (a.closed != b.closed || a.points.size() != b.points.size()) return false;
    for (size_t i = 0; i < a.points.size(); ++i)
        if (!latlng_close(a.points[i], b.points[i])) return false;
    return true;
}

std::vector<LatLng> vertex_pool(const ContextNode& c) {
    std::vector<LatLng> out;
    for (const auto& s : c.coordsets)
        for (const auto& p : s.points) {
            bool seen = false;
            for (const auto& q : out)
                if (latlng_close(p, q)) {
                    seen = true;
                    break;
                }
            if (!seen) out.push_back(p);
        }
    return out;
}

double total_duration(const ContextNode& c) {
    double sum = 0.0;
    for (const auto& r : c.times) sum += static_cast<double>(r.duration());
    return sum;
}

double total_area(const ContextNode& c) {
    double sum = 0.0;
    for (const auto& s : c.coordsets) sum += area_m2(s);
    return sum;
}

// Post-order walk; returns the survivor subtree, or nullopt when the
// node itself was pruned. The parent is the node's parent in the
// original tree.
std::optional<ContextNode> prune_node(const ContextNode& node, const ContextNode* parent,
                                      const PruneParams& params, int& pruned_count) {
    ContextNode survivor = node;
    survivor.children.clear();
    bool all_children_pruned = true;
    for (const auto& child : node.children) {
        auto kept = prune_node(child, &node, params, pruned_count);
        if (kept) {
            all_children_pruned = false;
            survivor.children.push_back(std::move(*kept));
        }
    }
    if (node.children.empty()) all_children_pruned = true;  // leaves vacuously

    if (parent && all_children_pruned &&
        cost_benefit(node, *parent, params.xi) < params.theta) {
        pruned_count += 1;
        return std::nullopt;
    }
    return survivor;
}

void collect_leaves(const ContextNode& n, std::vector<const ContextNode*>& out) {
    if (n.children.empty()) {
        out.push_back(&n);
        return;
    }
    for (const auto& c : n.children) collect_leaves(c, out);
}

}  // namespace

double cost(const ContextNode& c, const ContextNode& p, double xi) {
    double total = xi;

    for (const auto& r : c.times) {
        bool found = false;
        for (const auto& pr : p.times)
            if (r == pr) {
                found = true;
                break;
            }
        if (!found) total += 1.0;
    }

    for (const auto& s : c.coordsets) {
        bool found = false;
        for (const auto& ps : p.coordsets)
            if (coordsets_equal(s, ps)) {
                found = true;
                break;
            }
        if (!found) total += 1.0;
    }

    const auto child_points = vertex_pool(c);
    const auto parent_points = vertex_pool(p);
    for (const auto& cp : child_points) {
        bool found = false;
        for (const auto& pp : parent_points)
            if (latlng_close(cp, pp)) {
                found = true;
                break;
            }
        if (!found) total += 1.0;
    }
    return total;
}

double information(const ContextNode& c) {
    return total_duration(c) + total_area(c) + static_cast<double>(c.tags.size());
}

double utility(const ContextNode& c, const ContextNode& p) {
    const auto ratio = [](double child, double parent) {
        return parent > 0.0 ? child / parent : 1.0;
    };
    const double u = 1.0 - (ratio(total_duration(c), total_duration(p)) / 3.0 +
                            ratio(total_area(c), total_area(p)) / 3.0 +
                            ratio(static_cast<double>(c.tags.size()),
                                  static_cast<double>(p.tags.size())) / 3.0);
    return std::clamp(u, 0.0, 1.0);
}

double cost_benefit(const ContextNode& c, const ContextNode& p, double xi) {
    return utility(c, p) / cost(c, p, xi);
}

std::pair<ContextTree, PruneReport> prune_tree(const ContextTree& tree,
                                               const PruneParams& params,
                                               const Taxonomy& tax) {
    PruneReport report;
    auto survivor = prune_node(tree.root, nullptr, params, report.pruned_count);
    // The root is never pruned.
    ContextTree out = tree;
    out.root = std::move(*survivor);

    visit_nodes(out.root, [&](const ContextNode& n) {
        report.unpruned_count += 1;
        report.total_information += information(n);
    });

    std::vector<const ContextNode*> leaves;
    collect_leaves(out.root, leaves);
    double sum = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < leaves.size(); ++i)
        for (size_t j = i + 1; j < leaves.size(); ++j) {
            sum += hcd(*leaves[i], *leaves[j], tree.lambda, tax, tree.binning,
                       tree.tag_sim_mode);
            ++pairs;
        }
    report.avg_leaf_hcd = pairs ? sum / static_cast<double>(pairs) : 0.0;
    return {std::move(out), report};
}

}  // namespace ctree
