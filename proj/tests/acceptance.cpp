// Acceptance checks: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ctree/pipeline.hpp"
#include "ctree/synth.hpp"

using namespace ctree;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int n, bool ok, const std::string& what) {
    std::printf("criterion %d: %s - %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
}

bool non_increasing(const std::vector<double>& v, double tol = 1e-12) {
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > v[i] + tol) return false;
    return true;
}

bool non_decreasing(const std::vector<double>& v, double tol = 1e-12) {
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] < v[i] - tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// 1. Times-merge golden example.

bool check_times_merge() {
    auto hm = [](int h, int m) { return static_cast<Instant>(h * 3600 + m * 60); };
    const std::vector<TimeRange> a{{hm(10, 0), hm(10, 5)}, {hm(11, 0), hm(12, 0)}};
    const std::vector<TimeRange> b{
        {hm(10, 4), hm(10, 20)}, {hm(11, 10), hm(11, 15)}, {hm(12, 5), hm(12, 9)}};
    const std::vector<TimeRange> want{
        {hm(10, 0), hm(10, 20)}, {hm(11, 0), hm(12, 0)}, {hm(12, 5), hm(12, 9)}};
    return merge_time_ranges(a, b) == want && merge_time_ranges(b, a) == want;
}

// ---------------------------------------------------------------------------
// 2. Filter oracle equivalence on random windows.

AugmentedPoint make_ap(Instant ts, double accuracy, std::vector<std::string> ids) {
    AugmentedPoint p;
    p.point.timestamp = ts;
    p.point.accuracy = accuracy;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    p.element_ids = std::move(ids);
    return p;
}

bool check_filter_oracle() {
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> npts(1, 20), nids(0, 4), which(0, 6);
    std::uniform_real_distribution<double> acc(1.0, 80.0), thr(0.0, 1.0);
    std::uniform_int_distribution<Instant> gap(5, 500);

    for (int trial = 0; trial < 500; ++trial) {
        std::vector<AugmentedPoint> w;
        Instant ts = 0;
        const int n = npts(rng);
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> ids;
            for (int k = nids(rng); k-- > 0;) ids.push_back("e" + std::to_string(which(rng)));
            w.push_back(make_ap(ts, acc(rng), std::move(ids)));
            ts += gap(rng);
        }
        std::uniform_int_distribution<size_t> pick(0, w.size() - 1);
        const size_t center = pick(rng);
        const double delta = 1200.0;

        // Independent oracle: direct evaluation of the two equations,
        // element by element.
        std::set<std::string> vocab;
        for (const auto& p : w) vocab.insert(p.element_ids.begin(), p.element_ids.end());
        std::map<std::string, double> want_scores;
        for (const auto& id : vocab) {
            double inner = 0.0;
            int listings = 0;
            for (const auto& p : w) {
                bool listed = false;
                for (const auto& x : p.element_ids) listed = listed || x == id;
                if (!listed) continue;
                const double dist = std::abs(
                    static_cast<double>(p.point.timestamp - w[center].point.timestamp));
                inner += (1.0 / p.point.accuracy) * (1.0 - dist / delta);
                ++listings;
            }
            want_scores[id] = inner * listings;
        }

        const auto scores = score_elements({w, center}, delta);
        if (scores.size() != want_scores.size()) return false;
        double max_score = 0.0;
        for (const auto& [id, s] : want_scores) {
            if (std::abs(s - scores.at(id)) > 1e-9) return false;
            max_score = std::max(max_score, s);
        }
        if (max_score <= 0.0) continue;  // AllZero path, nothing to normalise

        const auto norm = normalise_scores(scores);
        const double t = thr(rng);
        const auto selected = select_elements(norm, t);
        for (const auto& [id, s] : want_scores) {
            const double expect = s / max_score;
            if (std::abs(norm.at(id) - expect) > 1e-9) return false;
            if ((expect > t) != (selected.count(id) == 1)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 3. Sweep trends on the fixed-seed synthetic day.

double mean_elements_per_point(const std::vector<AugmentedPoint>& pts) {
    if (pts.empty()) return 0.0;
    size_t total = 0;
    for (const auto& p : pts) total += p.element_ids.size();
    return static_cast<double>(total) / static_cast<double>(pts.size());
}

bool check_sweeps(const SynthData& day, std::string& detail) {
    const SpatialIndex index(day.elements);
    const auto aug = augment_trajectory(day.trajectory, index, day.elements);

    std::vector<double> by_t;
    for (const double t : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0})
        by_t.push_back(mean_elements_per_point(
            filter_trajectory(aug, {.delta = 1200.0, .threshold = t})));
    std::vector<double> by_delta;
    for (const double d : {300.0, 600.0, 1200.0, 2400.0, 4000.0})
        by_delta.push_back(mean_elements_per_point(
            filter_trajectory(aug, {.delta = d, .threshold = 0.8})));

    const auto filtered = filter_trajectory(aug, {});
    std::vector<double> period_counts, mean_durations;
    for (const double t_max : {60.0, 120.0, 300.0, 600.0, 1200.0, 2400.0, 5000.0}) {
        const auto interactions = summarise(filtered, day.elements, t_max);
        size_t count = 0;
        double total = 0.0;
        for (const auto& ia : interactions) {
            count += ia.times.size();
            for (const auto& r : ia.times) total += static_cast<double>(r.duration());
        }
        period_counts.push_back(static_cast<double>(count));
        mean_durations.push_back(count ? total / static_cast<double>(count) : 0.0);
    }

    const bool ok = non_increasing(by_t) && non_increasing(by_delta) &&
                    non_increasing(period_counts) && non_decreasing(mean_durations);
    if (!ok) {
        detail = "t:";
        for (double v : by_t) detail += " " + std::to_string(v);
        detail += " | delta:";
        for (double v : by_delta) detail += " " + std::to_string(v);
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 4. Clustering invariants + first-round oracle.

Taxonomy accept_taxonomy() {
    return Taxonomy::from_edges({{"entity", "structure"},
                                 {"structure", "building"},
                                 {"building", "house"},
                                 {"building", "office"},
                                 {"building", "hotel"},
                                 {"entity", "way"},
                                 {"way", "highway"},
                                 {"highway", "primary"},
                                 {"highway", "footway"}});
}

ElementInteraction rand_leaf(std::mt19937& rng, int i) {
    static const std::vector<Tag> vocab{
        Tag("building", "house"),  Tag("building", "office"), Tag("building", "hotel"),
        Tag("highway", "primary"), Tag("highway", "footway"), Tag("leisure", "park")};
    std::uniform_int_distribution<int> tagpick(0, 5), nranges(1, 3), ntags(1, 2);
    std::uniform_int_distribution<Instant> start(0, 86400 * 2), len(60, 9000);
    std::uniform_real_distribution<double> lat(51.9, 52.1), lng(-1.1, -0.9);

    ElementInteraction ia;
    ia.element.id = "e" + std::to_string(i);
    for (int k = ntags(rng); k-- > 0;) ia.element.tags.push_back(vocab[tagpick(rng)]);
    std::sort(ia.element.tags.begin(), ia.element.tags.end());
    ia.element.tags.erase(std::unique(ia.element.tags.begin(), ia.element.tags.end()),
                          ia.element.tags.end());
    std::vector<TimeRange> times;
    for (int k = nranges(rng); k-- > 0;) {
        const Instant s = start(rng);
        times.emplace_back(s, s + len(rng));
    }
    ia.times = merge_time_ranges(std::move(times));
    CoordinateSet s;
    s.closed = true;
    const double a = lat(rng), b = lng(rng);
    s.points = {{a, b}, {a, b + 0.001}, {a + 0.001, b + 0.001}, {a + 0.001, b}};
    ia.element.coordsets.push_back(std::move(s));
    return ia;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool check_clustering() {
    const Taxonomy tax = accept_taxonomy();
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> nleaves(1, 12);

    for (int trial = 0; trial < 200; ++trial) {
        const int n = nleaves(rng);
        std::vector<ElementInteraction> leaves;
        std::vector<TimeRange> all_times;
        for (int i = 0; i < n; ++i) {
            leaves.push_back(rand_leaf(rng, i));
            all_times.insert(all_times.end(), leaves.back().times.begin(),
                             leaves.back().times.end());
        }
        const double lambda = 0.5;
        const auto tree = build_context_tree(leaves, lambda, tax);

        // Leaf preservation and internal-node bound.
        std::set<std::string> got_leaves;
        int total = 0, internal = 0;
        visit_nodes(tree.root, [&](const ContextNode& c) {
            ++total;
            if (c.leaf_element_id)
                got_leaves.insert(*c.leaf_element_id);
            else
                ++internal;
        });
        std::set<std::string> want_leaves;
        for (const auto& l : leaves) want_leaves.insert(l.element.id);
        if (got_leaves != want_leaves) return false;
        if (internal > std::max(0, n - 1)) return false;
        if (tree.root.times != merge_time_ranges(all_times)) return false;

        // Leaf-level HCD sanity.
        std::vector<ContextNode> as_nodes;
        for (const auto& l : leaves) {
            ContextNode c;
            c.tags = l.element.tags;
            c.times = l.times;
            c.coordsets = l.element.coordsets;
            as_nodes.push_back(std::move(c));
        }
        for (int i = 0; i < n; ++i) {
            if (hcd(as_nodes[i], as_nodes[i], lambda, tax, {}) > 1e-12) return false;
            for (int j = i + 1; j < n; ++j) {
                const double d = hcd(as_nodes[i], as_nodes[j], lambda, tax, {});
                const double e = hcd(as_nodes[j], as_nodes[i], lambda, tax, {});
                if (std::abs(d - e) > 1e-12 || d < 0.0 || d > 1.0) return false;
            }
        }

        // First merge round: global-minimum grouping oracle.
        if (n < 2) continue;
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                dmin = std::min(dmin, hcd(as_nodes[i], as_nodes[j], lambda, tax, {}));
        UnionFind uf(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (hcd(as_nodes[i], as_nodes[j], lambda, tax, {}) <= dmin + 1e-9)
                    uf.unite(i, j);
        std::map<int, std::set<std::string>> groups;
        for (int i = 0; i < n; ++i) groups[uf.find(i)].insert(leaves[i].element.id);

        for (const auto& [rep, members] : groups) {
            if (members.size() < 2) continue;
            // The tree must contain a node whose children are exactly
            // these leaves.
            bool found = false;
            visit_nodes(tree.root, [&](const ContextNode& c) {
                if (found || c.children.size() != members.size()) return;
                std::set<std::string> kids;
                for (const auto& k : c.children)
                    if (k.leaf_element_id) kids.insert(*k.leaf_element_id);
                found = kids == members;
            });
            if (!found) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 5. Semantic metric hand values.

bool check_semantics() {
    const Taxonomy tax = accept_taxonomy();  // 10 nodes (incl. root)
    auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };

    if (!close(wup_similarity(tax, "house", "office"), 2.0 * 3.0 / 8.0)) return false;
    if (!close(wup_similarity(tax, "house", "building"), 2.0 * 3.0 / 7.0)) return false;
    if (!close(wup_similarity(tax, "structure", "house"), 2.0 / 3.0)) return false;
    if (!close(wup_similarity(tax, "house", "primary"), 2.0 / 8.0)) return false;
    if (!close(wup_similarity(tax, "building", "highway"), 2.0 / 6.0)) return false;
    if (!close(wup_similarity(tax, "primary", "footway"), 2.0 * 3.0 / 8.0)) return false;
    if (!close(wup_similarity(tax, "entity", "entity"), 1.0)) return false;
    if (!close(wup_similarity(tax, "hotel", "hotel"), 1.0)) return false;

    // Jaccard over two 4-string feature sets takes only 5 values.
    const std::set<double> allowed{0.0, 1.0 / 7.0, 1.0 / 3.0, 3.0 / 5.0, 1.0};
    std::mt19937 rng(31337);
    std::uniform_int_distribution<Instant> start(0, 86400 * 2), len(60, 30000);
    std::uniform_int_distribution<int> nranges(1, 5), with_area(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        auto gen = [&] {
            ContextNode c;
            std::vector<TimeRange> times;
            for (int k = nranges(rng); k-- > 0;) {
                const Instant s = start(rng);
                times.emplace_back(s, s + len(rng));
            }
            c.times = merge_time_ranges(std::move(times));
            if (with_area(rng)) {
                CoordinateSet s;
                s.closed = true;
                s.points = {{52, -1}, {52, -0.999}, {52.001, -0.999}, {52.001, -1}};
                c.coordsets.push_back(std::move(s));
            }
            return c;
        };
        const double f = feature_similarity(gen(), gen(), {});
        bool ok = false;
        for (const double v : allowed) ok = ok || std::abs(f - v) < 1e-12;
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 6. Pruning properties.

ContextTree tree_from_synth(const SynthData& data, double lambda) {
    const SpatialIndex index(data.elements);
    const auto aug = augment_trajectory(data.trajectory, index, data.elements);
    const auto filtered = filter_trajectory(aug, {});
    const auto interactions = summarise(filtered, data.elements);
    return build_context_tree(interactions, lambda, data.taxonomy);
}

int count_nodes(const ContextNode& root) {
    int n = 0;
    visit_nodes(root, [&](const ContextNode&) { ++n; });
    return n;
}

bool check_pruning(const SynthData& day, const SynthData& week, std::string& detail) {
    const std::vector<double> thetas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                     0.6, 0.7, 0.8, 0.9, 1.0};
    const std::vector<double> xis{0.5, 1.0, 1.5, 2.0};

    // Trend sweeps on the one-day tree (feature-weighted distance).
    const ContextTree sweep_tree = tree_from_synth(day, 0.25);
    std::vector<double> surv, info, hcds;
    for (const double theta : thetas) {
        const auto [pruned, report] =
            prune_tree(sweep_tree, {.theta = theta, .xi = 1.0}, day.taxonomy);
        surv.push_back(report.unpruned_count);
        info.push_back(report.total_information);
        hcds.push_back(report.avg_leaf_hcd);
        if (theta == 0.0 && report.pruned_count != 0) {
            detail = "theta=0 pruned something";
            return false;
        }
    }
    if (!non_increasing(surv) || !non_increasing(info) || !non_increasing(hcds, 1e-9)) {
        detail = "theta sweep not monotone:";
        for (double v : hcds) detail += " " + std::to_string(v);
        return false;
    }
    std::vector<double> xsurv, xinfo, xhcd;
    for (const double xi : xis) {
        const auto [pruned, report] =
            prune_tree(sweep_tree, {.theta = 0.2, .xi = xi}, day.taxonomy);
        xsurv.push_back(report.unpruned_count);
        xinfo.push_back(report.total_information);
        xhcd.push_back(report.avg_leaf_hcd);
    }
    if (!non_increasing(xsurv) || !non_increasing(xinfo) || !non_increasing(xhcd, 1e-9)) {
        detail = "xi sweep not monotone";
        return false;
    }

    // Identical child always pruned for theta > 0.
    {
        ContextTree t;
        t.root.id = 0;
        t.root.tags = {Tag("building", "house")};
        t.root.times = {{0, 3600}};
        ContextNode clone = t.root;
        clone.id = 1;
        clone.leaf_element_id = "e0";
        ContextNode other;
        other.id = 2;
        other.tags = {Tag("leisure", "park")};
        other.times = {{9000, 12000}};
        other.leaf_element_id = "e1";
        t.root.children = {clone, other};
        for (const double theta : {0.01, 0.2, 0.9}) {
            const auto [pruned, report] =
                prune_tree(t, {.theta = theta, .xi = 1.0}, day.taxonomy);
            bool clone_gone = true;
            visit_nodes(pruned.root,
                        [&](const ContextNode& c) { clone_gone = clone_gone && c.id != 1; });
            if (!clone_gone) {
                detail = "identical child survived";
                return false;
            }
        }
    }

    // Survivor set upward-closed on the weekly tree.
    const ContextTree week_tree = tree_from_synth(week, 0.5);
    {
        std::map<int, int> parents;
        std::function<void(const ContextNode&)> walk = [&](const ContextNode& c) {
            for (const auto& k : c.children) {
                parents[k.id] = c.id;
                walk(k);
            }
        };
        walk(week_tree.root);
        for (const double theta : {0.2, 0.4, 0.6}) {
            const auto [pruned, report] =
                prune_tree(week_tree, {.theta = theta, .xi = 1.0}, week.taxonomy);
            std::set<int> survivors;
            visit_nodes(pruned.root,
                        [&](const ContextNode& c) { survivors.insert(c.id); });
            for (const int id : survivors) {
                if (id == week_tree.root.id) continue;
                if (survivors.count(parents.at(id)) == 0) {
                    detail = "survivor set not upward closed";
                    return false;
                }
            }
        }
    }

    // Qualitative storage/information trade-off on the weekly tree: at
    // the first theta where fewer than 25% of nodes survive, at least
    // half of the information is retained.
    const int total = count_nodes(week_tree.root);
    double baseline = 0.0;
    for (const double theta : thetas) {
        const auto [pruned, report] =
            prune_tree(week_tree, {.theta = theta, .xi = 1.0}, week.taxonomy);
        if (theta == 0.0) baseline = report.total_information;
        if (report.unpruned_count < 0.25 * total) {
            const double retained = report.total_information / baseline;
            if (retained < 0.5) {
                detail = "retained " + std::to_string(retained) + " at theta " +
                         std::to_string(theta);
                return false;
            }
            return true;
        }
    }
    detail = "survivors never fell below 25%";
    return false;
}

// ---------------------------------------------------------------------------
// 7. End-to-end determinism.

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("ctree_accept_" + tag + "_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

PipelineResult pipeline_run(const TempDir& dir) {
    const SynthData data = synthesize(42, {});
    write_file(dir.file("trajectory.csv"), serialize_trajectory_csv(data.trajectory));
    write_file(dir.file("land_usage.json"), serialize_land_usage(data.elements));
    write_file(dir.file("taxonomy.txt"), serialize_taxonomy(data.taxonomy));
    PipelineConfig config;
    config.trajectory_path = dir.file("trajectory.csv");
    config.land_usage_path = dir.file("land_usage.json");
    config.taxonomy_path = dir.file("taxonomy.txt");
    return run_pipeline(config);
}

bool check_determinism() {
    const TempDir d1("a"), d2("b");
    const auto r1 = pipeline_run(d1);
    const auto r2 = pipeline_run(d2);
    return tree_to_json(r1.tree) == tree_to_json(r2.tree) &&
           tree_to_dot(r1.tree) == tree_to_dot(r2.tree);
}

// ---------------------------------------------------------------------------
// 8. Coverage analysis.

bool check_coverage(const SynthData& week, std::string& detail) {
    const SpatialIndex index(week.elements);
    const auto aug = augment_trajectory(week.trajectory, index, week.elements);
    const auto filtered = filter_trajectory(aug, {});
    const auto rows = coverage_by_day(filtered);
    if (rows.size() < 5) {
        detail = "too few coverage rows";
        return false;
    }
    for (const auto& row : rows) {
        if (row.retrained_pct < row.fixed_pct) {
            detail = "fixed beat retrained on day " + std::to_string(row.day);
            return false;
        }
        if (row.day >= 3 && row.retrained_pct < 90.0) {
            detail = "retrained " + std::to_string(row.retrained_pct) + " on day " +
                     std::to_string(row.day);
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    const SynthData day = synthesize(42, {});
    SynthSpec week_spec;
    week_spec.days = 7;
    const SynthData week = synthesize(42, week_spec);

    std::string detail;

    criterion(1, check_times_merge(), "times-merge golden example");
    criterion(2, check_filter_oracle(), "filter scoring matches the brute-force oracle");

    detail.clear();
    const bool sweeps = check_sweeps(day, detail);
    criterion(3, sweeps,
              "parameter sweep trends" + (detail.empty() ? "" : " (" + detail + ")"));

    criterion(4, check_clustering(), "clustering invariants and first-round oracle");
    criterion(5, check_semantics(), "semantic metric hand values");

    detail.clear();
    const bool pruning = check_pruning(day, week, detail);
    criterion(6, pruning,
              "pruning properties" + (detail.empty() ? "" : " (" + detail + ")"));

    criterion(7, check_determinism(), "end-to-end determinism");

    detail.clear();
    const bool coverage = check_coverage(week, detail);
    criterion(8, coverage,
              "coverage analysis" + (detail.empty() ? "" : " (" + detail + ")"));

    return failures;
}
