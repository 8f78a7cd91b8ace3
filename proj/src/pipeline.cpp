#include "ctree/pipeline.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

#include "ctree/errors.hpp"

namespace ctree {

using nlohmann::json;

PipelineConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw MalformedRecord(path, 0, e.what());
    }
    PipelineConfig c;
    c.trajectory_path = j.value("trajectory", "");
    c.land_usage_path = j.value("land_usage", "");
    c.taxonomy_path = j.value("taxonomy", "");
    c.default_accuracy = j.value("default_accuracy", 10.0);
    c.filter.delta = j.value("delta", 1200.0);
    c.filter.threshold = j.value("t", 0.8);
    c.filter.edge_windows = j.value("edge_windows", false);
    c.t_max = j.value("t_max", 1200.0);
    c.lambda = j.value("lambda", 0.5);
    c.binning.time_of_day_bin_hours = j.value("time_of_day_bin_hours", 4);
    c.tag_sim_mode = tag_sim_mode_from_string(j.value("tag_sim_mode", "combined"));
    c.prune = j.value("prune", false);
    c.prune_params.theta = j.value("theta", 0.2);
    c.prune_params.xi = j.value("xi", 1.0);
    return c;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError(path);
    out << content;
    if (!out) throw IoError(path);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    const Trajectory traj = parse_trajectory(config.trajectory_path, config.default_accuracy);
    const ElementStore store = parse_land_usage(config.land_usage_path);
    const Taxonomy tax = parse_taxonomy(config.taxonomy_path);

    const SpatialIndex index(store);
    const auto augmented = augment_trajectory(traj, index, store);
    const auto filtered = filter_trajectory(augmented, config.filter);
    const auto interactions = summarise(filtered, store, config.t_max);

    if (config.dump_augmented) write_file(*config.dump_augmented, serialize_augmented(augmented));
    if (config.dump_filtered) write_file(*config.dump_filtered, serialize_augmented(filtered));
    if (config.dump_summarised)
        write_file(*config.dump_summarised, serialize_interactions(interactions));

    PipelineResult result;
    result.augmented_points = augmented.size();
    result.filtered_points = filtered.size();
    result.interactions = interactions.size();
    result.tree = build_context_tree(interactions, config.lambda, tax, config.binning,
                                     config.tag_sim_mode);
    if (config.prune) {
        auto [pruned, report] = prune_tree(result.tree, config.prune_params, tax);
        result.pruned_tree = std::move(pruned);
        result.prune_report = report;
    }
    return result;
}

double coverage_pct(const std::set<std::string>& train, const std::set<std::string>& test) {
    if (test.empty()) throw EmptyTestDay();
    size_t hits = 0;
    for (const auto& id : test)
        if (train.count(id)) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(test.size());
}

std::vector<CoverageRow> coverage_by_day(const std::vector<AugmentedPoint>& filtered) {
    std::map<Instant, std::set<std::string>> days;  // UTC day index -> ids
    for (const auto& ap : filtered) {
        if (ap.element_ids.empty()) continue;
        const Instant day = ap.point.timestamp / 86400;
        days[day].insert(ap.element_ids.begin(), ap.element_ids.end());
    }
    std::vector<CoverageRow> out;
    if (days.size() < 2) return out;

    const auto first_day = days.begin()->first;
    const std::set<std::string>& fixed_train = days.begin()->second;
    std::set<std::string> retrained_train = fixed_train;
    for (auto it = std::next(days.begin()); it != days.end(); ++it) {
        CoverageRow row;
        row.day = static_cast<int>(it->first - first_day);
        row.fixed_pct = coverage_pct(fixed_train, it->second);
        row.retrained_pct = coverage_pct(retrained_train, it->second);
        out.push_back(row);
        retrained_train.insert(it->second.begin(), it->second.end());
    }
    return out;
}

TreeStats tree_stats(const ContextTree& tree) {
    TreeStats stats;
    visit_nodes(tree.root, [&](const ContextNode& n) {
        stats.total_nodes += 1;
        if (n.is_leaf()) {
            stats.leaf_nodes += 1;
            stats.time_periods += static_cast<int>(n.times.size());
        }
    });
    return stats;
}

void export_dot(const ContextTree& tree, const std::string& path) {
    write_file(path, tree_to_dot(tree));
}

}  // namespace ctree
