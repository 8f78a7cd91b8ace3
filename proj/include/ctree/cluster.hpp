#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctree/core.hpp"
#include "ctree/ingest.hpp"
#include "ctree/summarise.hpp"

namespace ctree {

/// Which part of a key:value pair the inner word similarity compares.
enum class TagSimMode { Keys, Values, Combined };

TagSimMode tag_sim_mode_from_string(const std::string& s);
std::string to_string(TagSimMode mode);

/// Bin parameters for the interaction-feature strings. Duration,
/// count and area use fixed log scales so that order of magnitude,
/// not raw value, defines context.
struct FeatureBinning {
    int time_of_day_bin_hours = 4;
};

/// A cluster in the context tree. Leaves wrap a single element
/// interaction; internal nodes carry merged tags, times and geometry.
struct ContextNode {
    int id = 0;
    std::vector<Tag> tags;                 // sorted unique key:value pairs
    std::vector<TimeRange> times;          // merged, sorted
    std::vector<CoordinateSet> coordsets;
    std::vector<ContextNode> children;
    std::optional<std::string> leaf_element_id;

    bool is_leaf() const { return children.empty(); }
};

struct ContextTree {
    ContextNode root;
    double lambda = 0.5;
    FeatureBinning binning;
    TagSimMode tag_sim_mode = TagSimMode::Combined;
};

// ---------------------------------------------------------------------------
// Merge semantics

/// Merge a group of >= 2 clusters into one. Times are unioned with
/// overlap coalescing, tags are unioned keeping multiple values per
/// key, and coordsets stay discrete except that intersecting pairs
/// are replaced by the convex hull of their combined points, applied
/// to a fixpoint. The group members become children.
ContextNode merge_clusters(std::vector<ContextNode> group);

// ---------------------------------------------------------------------------
// Similarity metrics

/// Wu-Palmer word similarity: 2*depth(LCS)/(depth(a)+depth(b)) with
/// depth(root) = 1. Words absent from the taxonomy fall back to exact
/// (case-insensitive) equality.
double wup_similarity(const Taxonomy& tax, const std::string& a, const std::string& b);

/// Directed tag-set similarity: mean over t1 of the best-matching
/// similarity against t2. Throws EmptyTagSet when t1 is empty.
double tag_sim(const std::vector<Tag>& t1, const std::vector<Tag>& t2, const Taxonomy& tax,
               TagSimMode mode = TagSimMode::Combined);

/// Max of the two directed TagSim values; 0 when either cluster is tagless.
double semantic_similarity(const ContextNode& c1, const ContextNode& c2, const Taxonomy& tax,
                           TagSimMode mode = TagSimMode::Combined);

/// Exactly 4 binned feature strings: mean interaction duration, modal
/// start-of-day bin, interaction count, and total covered area.
std::set<std::string> feature_strings(const ContextNode& c, const FeatureBinning& b);

/// Jaccard index over the feature string sets.
double feature_similarity(const ContextNode& c1, const ContextNode& c2,
                          const FeatureBinning& b);

/// Minimum great-circle distance over all vertex pairs. Exposed for
/// callers with domain knowledge; not part of the hybrid distance.
double geographical_distance(const ContextNode& c1, const ContextNode& c2);

/// Hybrid contextual distance:
///   1 - (lambda * semantic + (1 - lambda) * feature)
double hcd(const ContextNode& c1, const ContextNode& c2, double lambda, const Taxonomy& tax,
           const FeatureBinning& b, TagSimMode mode = TagSimMode::Combined);

// ---------------------------------------------------------------------------
// Tree construction

/// Greedy agglomerative clustering. Each round recomputes the pairwise
/// distance matrix, takes every pair within 1e-9 of the global minimum,
/// unions overlapping pairs into groups, and merges each group.
/// Deterministic given input order.
ContextTree build_context_tree(const std::vector<ElementInteraction>& leaves, double lambda,
                               const Taxonomy& tax, const FeatureBinning& binning = {},
                               TagSimMode mode = TagSimMode::Combined);

// ---------------------------------------------------------------------------
// Serialization

std::string tree_to_json(const ContextTree& tree);
ContextTree tree_from_json_file(const std::string& path);
ContextTree tree_from_json_stream(std::istream& in, const std::string& name);

/// DOT digraph; node labels show the top-2 tag keys by frequency.
std::string tree_to_dot(const ContextTree& tree);

/// Visit every node (pre-order).
void visit_nodes(const ContextNode& root, const std::function<void(const ContextNode&)>& fn);

}  // namespace ctree
