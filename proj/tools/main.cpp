// Command-line front end for the context-tree pipeline. Subcommands
// mirror the pipeline stages and compose through files; `pipeline`
// runs everything in one shot.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctree/errors.hpp"
#include "ctree/pipeline.hpp"
#include "ctree/synth.hpp"

using namespace ctree;
using nlohmann::json;

namespace {

json report_to_json(const PruneReport& r) {
    return {{"unpruned_count", r.unpruned_count},
            {"pruned_count", r.pruned_count},
            {"total_information", r.total_information},
            {"avg_leaf_hcd", r.avg_leaf_hcd}};
}

int run(int argc, char** argv) {
    CLI::App app{"context tree construction from geospatial trajectories"};
    app.require_subcommand(1);

    // --- synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic city + routine");
    std::uint64_t seed = 42;
    SynthSpec synth_spec;
    std::string out_dir = ".";
    synth_cmd->add_option("--seed", seed, "RNG seed");
    synth_cmd->add_option("--days", synth_spec.days, "days of trajectory");
    synth_cmd->add_option("--interval", synth_spec.sample_interval_s, "sampling interval (s)");
    synth_cmd->add_option("--accuracy", synth_spec.base_accuracy_m, "base accuracy (m)");
    synth_cmd->add_option("--noise", synth_spec.position_noise_m, "position noise (m)");
    synth_cmd->add_option("--out-dir", out_dir, "output directory");

    // --- augment
    auto* augment_cmd = app.add_subcommand("augment", "attach element ids to points");
    std::string traj_path, land_path, in_path, out_path, tax_path;
    double default_accuracy = 10.0;
    augment_cmd->add_option("--trajectory", traj_path)->required();
    augment_cmd->add_option("--land-usage", land_path)->required();
    augment_cmd->add_option("--default-accuracy", default_accuracy);
    augment_cmd->add_option("--out", out_path)->required();

    // --- filter
    auto* filter_cmd = app.add_subcommand("filter", "temporal-buffer weighted filter");
    FilterParams fp;
    filter_cmd->add_option("--in", in_path)->required();
    filter_cmd->add_option("--delta", fp.delta, "buffer half-width (s)");
    filter_cmd->add_option("--t", fp.threshold, "selection threshold in [0,1]");
    filter_cmd->add_flag("--edge-windows", fp.edge_windows, "emit boundary points too");
    filter_cmd->add_option("--out", out_path)->required();

    // --- summarise
    auto* summarise_cmd = app.add_subcommand("summarise", "collapse to interaction periods");
    double t_max = 1200.0;
    summarise_cmd->add_option("--in", in_path)->required();
    summarise_cmd->add_option("--land-usage", land_path)->required();
    summarise_cmd->add_option("--t-max", t_max, "max gap within one period (s)");
    summarise_cmd->add_option("--out", out_path)->required();

    // --- cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "build the context tree");
    double lambda = 0.5;
    std::string tag_sim_mode = "combined";
    int tod_bin = 4;
    cluster_cmd->add_option("--in", in_path)->required();
    cluster_cmd->add_option("--taxonomy", tax_path)->required();
    cluster_cmd->add_option("--lambda", lambda, "semantic weighting in [0,1]");
    cluster_cmd->add_option("--tag-sim", tag_sim_mode, "keys|values|combined");
    cluster_cmd->add_option("--tod-bin", tod_bin, "time-of-day bin width (h)");
    cluster_cmd->add_option("--out", out_path)->required();

    // --- prune
    auto* prune_cmd = app.add_subcommand("prune", "cost/benefit tree pruning");
    PruneParams pp;
    std::string report_path, report_csv_path;
    prune_cmd->add_option("--in", in_path)->required();
    prune_cmd->add_option("--taxonomy", tax_path)->required();
    prune_cmd->add_option("--theta", pp.theta, "prune threshold");
    prune_cmd->add_option("--xi", pp.xi, "per-node penalty");
    prune_cmd->add_option("--out", out_path)->required();
    prune_cmd->add_option("--report", report_path, "write report JSON");
    prune_cmd->add_option("--report-csv", report_csv_path, "write plot-ready CSV row");

    // --- pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage in one shot");
    std::string config_path, pruned_out, dump_aug, dump_filt, dump_sum, dot_out;
    bool do_prune = false;
    pipeline_cmd->add_option("--config", config_path, "JSON config; flags override");
    pipeline_cmd->add_option("--trajectory", traj_path);
    pipeline_cmd->add_option("--land-usage", land_path);
    pipeline_cmd->add_option("--taxonomy", tax_path);
    pipeline_cmd->add_option("--default-accuracy", default_accuracy);
    pipeline_cmd->add_option("--delta", fp.delta);
    pipeline_cmd->add_option("--t", fp.threshold);
    pipeline_cmd->add_flag("--edge-windows", fp.edge_windows);
    pipeline_cmd->add_option("--t-max", t_max);
    pipeline_cmd->add_option("--lambda", lambda);
    pipeline_cmd->add_option("--tag-sim", tag_sim_mode);
    pipeline_cmd->add_option("--tod-bin", tod_bin);
    pipeline_cmd->add_flag("--prune", do_prune);
    pipeline_cmd->add_option("--theta", pp.theta);
    pipeline_cmd->add_option("--xi", pp.xi);
    pipeline_cmd->add_option("--out", out_path)->required();
    pipeline_cmd->add_option("--pruned-out", pruned_out);
    pipeline_cmd->add_option("--dot-out", dot_out);
    pipeline_cmd->add_option("--dump-augmented", dump_aug);
    pipeline_cmd->add_option("--dump-filtered", dump_filt);
    pipeline_cmd->add_option("--dump-summarised", dump_sum);

    // --- stats
    auto* stats_cmd = app.add_subcommand("stats", "tree node/leaf/period counts");
    stats_cmd->add_option("--in", in_path)->required();

    // --- coverage
    auto* coverage_cmd = app.add_subcommand("coverage", "day-by-day element coverage");
    coverage_cmd->add_option("--in", in_path, "filtered points (JSON lines)")->required();
    coverage_cmd->add_option("--out", out_path, "CSV output (default stdout)");

    // --- export-dot
    auto* dot_cmd = app.add_subcommand("export-dot", "render a tree as DOT");
    dot_cmd->add_option("--in", in_path)->required();
    dot_cmd->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's error-code zoo onto the documented 0/1.
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (synth_cmd->parsed()) {
        const SynthData data = synthesize(seed, synth_spec);
        write_file(out_dir + "/trajectory.csv", serialize_trajectory_csv(data.trajectory));
        write_file(out_dir + "/land_usage.json", serialize_land_usage(data.elements));
        write_file(out_dir + "/taxonomy.txt", serialize_taxonomy(data.taxonomy));
        write_file(out_dir + "/visits.json", serialize_visits(data.visits));
        std::cout << "wrote " << data.trajectory.points.size() << " points, "
                  << data.elements.elements.size() << " elements to " << out_dir << "\n";
    } else if (augment_cmd->parsed()) {
        const Trajectory traj = parse_trajectory(traj_path, default_accuracy);
        const ElementStore store = parse_land_usage(land_path);
        const SpatialIndex index(store);
        write_file(out_path, serialize_augmented(augment_trajectory(traj, index, store)));
    } else if (filter_cmd->parsed()) {
        const auto aug = parse_augmented(in_path);
        write_file(out_path, serialize_augmented(filter_trajectory(aug, fp)));
    } else if (summarise_cmd->parsed()) {
        const auto filtered = parse_augmented(in_path);
        const ElementStore store = parse_land_usage(land_path);
        write_file(out_path, serialize_interactions(summarise(filtered, store, t_max)));
    } else if (cluster_cmd->parsed()) {
        const auto interactions = parse_interactions(in_path);
        const Taxonomy tax = parse_taxonomy(tax_path);
        FeatureBinning binning;
        binning.time_of_day_bin_hours = tod_bin;
        const auto tree = build_context_tree(interactions, lambda, tax, binning,
                                             tag_sim_mode_from_string(tag_sim_mode));
        write_file(out_path, tree_to_json(tree));
    } else if (prune_cmd->parsed()) {
        const auto tree = tree_from_json_file(in_path);
        const Taxonomy tax = parse_taxonomy(tax_path);
        const auto [pruned, report] = prune_tree(tree, pp, tax);
        write_file(out_path, tree_to_json(pruned));
        if (!report_path.empty()) write_file(report_path, report_to_json(report).dump(2));
        if (!report_csv_path.empty()) {
            std::ostringstream csv;
            csv << "theta,xi,unpruned,avg_hcd,information\n"
                << pp.theta << ',' << pp.xi << ',' << report.unpruned_count << ','
                << report.avg_leaf_hcd << ',' << report.total_information << '\n';
            write_file(report_csv_path, csv.str());
        }
    } else if (pipeline_cmd->parsed()) {
        PipelineConfig config;
        if (!config_path.empty()) config = config_from_json_file(config_path);
        auto override_str = [](const CLI::Option* o, std::string& dst, const std::string& v) {
            if (o->count()) dst = v;
        };
        override_str(pipeline_cmd->get_option("--trajectory"), config.trajectory_path, traj_path);
        override_str(pipeline_cmd->get_option("--land-usage"), config.land_usage_path, land_path);
        override_str(pipeline_cmd->get_option("--taxonomy"), config.taxonomy_path, tax_path);
        if (pipeline_cmd->count("--default-accuracy")) config.default_accuracy = default_accuracy;
        if (pipeline_cmd->count("--delta")) config.filter.delta = fp.delta;
        if (pipeline_cmd->count("--t")) config.filter.threshold = fp.threshold;
        if (pipeline_cmd->count("--edge-windows")) config.filter.edge_windows = fp.edge_windows;
        if (pipeline_cmd->count("--t-max")) config.t_max = t_max;
        if (pipeline_cmd->count("--lambda")) config.lambda = lambda;
        if (pipeline_cmd->count("--tag-sim"))
            config.tag_sim_mode = tag_sim_mode_from_string(tag_sim_mode);
        if (pipeline_cmd->count("--tod-bin")) config.binning.time_of_day_bin_hours = tod_bin;
        if (pipeline_cmd->count("--prune")) config.prune = do_prune;
        if (pipeline_cmd->count("--theta")) config.prune_params.theta = pp.theta;
        if (pipeline_cmd->count("--xi")) config.prune_params.xi = pp.xi;
        if (!pruned_out.empty()) config.prune = true;
        if (!dump_aug.empty()) config.dump_augmented = dump_aug;
        if (!dump_filt.empty()) config.dump_filtered = dump_filt;
        if (!dump_sum.empty()) config.dump_summarised = dump_sum;

        const PipelineResult result = run_pipeline(config);
        write_file(out_path, tree_to_json(result.tree));
        if (!pruned_out.empty() && result.pruned_tree)
            write_file(pruned_out, tree_to_json(*result.pruned_tree));
        if (!dot_out.empty()) export_dot(result.tree, dot_out);
        if (result.prune_report)
            std::cout << report_to_json(*result.prune_report).dump() << "\n";
    } else if (stats_cmd->parsed()) {
        const auto stats = tree_stats(tree_from_json_file(in_path));
        std::cout << json{{"total_nodes", stats.total_nodes},
                          {"leaf_nodes", stats.leaf_nodes},
                          {"time_periods", stats.time_periods}}
                         .dump()
                  << "\n";
    } else if (coverage_cmd->parsed()) {
        const auto rows = coverage_by_day(parse_augmented(in_path));
        std::ostringstream csv;
        csv << "day,fixed,retrained\n";
        for (const auto& r : rows)
            csv << r.day << ',' << r.fixed_pct << ',' << r.retrained_pct << '\n';
        if (out_path.empty())
            std::cout << csv.str();
        else
            write_file(out_path, csv.str());
    } else if (dot_cmd->parsed()) {
        export_dot(tree_from_json_file(in_path), out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
