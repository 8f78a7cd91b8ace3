#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctree/augment.hpp"
#include "ctree/cluster.hpp"
#include "ctree/filter.hpp"
#include "ctree/prune.hpp"
#include "ctree/summarise.hpp"

namespace ctree {

/// Full parameter set for a pipeline run. Defaults follow the module
/// defaults: delta=1200, t=0.8, t_max=1200, lambda=0.5, theta=0.2, xi=1.
struct PipelineConfig {
    std::string trajectory_path;
    std::string land_usage_path;
    std::string taxonomy_path;

    double default_accuracy = 10.0;
    FilterParams filter;
    double t_max = 1200.0;
    double lambda = 0.5;
    FeatureBinning binning;
    TagSimMode tag_sim_mode = TagSimMode::Combined;
    bool prune = false;
    PruneParams prune_params;

    // Optional intermediate dumps.
    std::optional<std::string> dump_augmented;
    std::optional<std::string> dump_filtered;
    std::optional<std::string> dump_summarised;
};

PipelineConfig config_from_json_file(const std::string& path);

struct PipelineResult {
    ContextTree tree;
    std::optional<ContextTree> pruned_tree;
    std::optional<PruneReport> prune_report;
    size_t augmented_points = 0;
    size_t filtered_points = 0;
    size_t interactions = 0;
};

/// Execute all stages in order: parse, augment, filter, summarise,
/// cluster, and optionally prune.
PipelineResult run_pipeline(const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Analysis

/// Percentage of unique test ids also present in the training set.
/// Throws EmptyTestDay when the test set is empty.
double coverage_pct(const std::set<std::string>& train, const std::set<std::string>& test);

struct CoverageRow {
    int day = 0;  // test day index, 1-based (day 0 is training only)
    double fixed_pct = 0.0;      // training = day 0
    double retrained_pct = 0.0;  // training = days 0..n-1
};

/// Day-by-day coverage over filtered points, partitioned at UTC midnight.
/// Days with no elements are skipped.
std::vector<CoverageRow> coverage_by_day(const std::vector<AugmentedPoint>& filtered);

struct TreeStats {
    int total_nodes = 0;
    int leaf_nodes = 0;
    int time_periods = 0;  // sum over leaves of their range counts
};

TreeStats tree_stats(const ContextTree& tree);

/// Write the DOT rendering of a tree; throws IoError on failure.
void export_dot(const ContextTree& tree, const std::string& path);

void write_file(const std::string& path, const std::string& content);

}  // namespace ctree
