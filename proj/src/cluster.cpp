#include "ctree/cluster.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ctree/errors.hpp"

namespace ctree {

using nlohmann::json;

namespace {

constexpr double kTieEpsilon = 1e-9;  // "same distance" tolerance

std::vector<std::string> tokenize(const std::string& word) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : word) {
        if (c == '_' || c == ' ' || c == '\t') {
            if (!cur.empty()) tokens.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// Best-scoring token pair; multi-word values like "bus_stop" match on
// their strongest token.
double word_sim(const Taxonomy& tax, const std::string& a, const std::string& b) {
    const auto ta = tokenize(a);
    const auto tb = tokenize(b);
    if (ta.empty() || tb.empty()) return to_lower(a) == to_lower(b) ? 1.0 : 0.0;
    double best = 0.0;
    for (const auto& x : ta)
        for (const auto& y : tb) best = std::max(best, wup_similarity(tax, x, y));
    return best;
}

double single_tag_sim(const Tag& a, const Tag& b, const Taxonomy& tax, TagSimMode mode) {
    switch (mode) {
        case TagSimMode::Keys:
            return word_sim(tax, a.key, b.key);
        case TagSimMode::Values:
            return word_sim(tax, a.value, b.value);
        case TagSimMode::Combined:
            return 0.5 * word_sim(tax, a.key, b.key) + 0.5 * word_sim(tax, a.value, b.value);
    }
    return 0.0;
}

std::vector<Tag> union_tags(const std::vector<ContextNode>& nodes) {
    std::vector<Tag> tags;
    for (const auto& n : nodes) tags.insert(tags.end(), n.tags.begin(), n.tags.end());
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    return tags;
}

std::vector<LatLng> all_vertices(const ContextNode& c) {
    std::vector<LatLng> out;
    for (const auto& s : c.coordsets)
        out.insert(out.end(), s.points.begin(), s.points.end());
    return out;
}

// Disjoint-set for grouping overlapping minimum-distance pairs.
struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

json node_to_json(const ContextNode& n) {
    json j;
    j["id"] = n.id;
    json tags = json::object();
    for (const auto& t : n.tags) tags[t.key].push_back(t.value);
    j["tags"] = tags;
    json times = json::array();
    for (const auto& r : n.times)
        times.push_back({{"begin", format_instant(r.begin)}, {"end", format_instant(r.end)}});
    j["times"] = times;
    json sets = json::array();
    for (const auto& s : n.coordsets) {
        json js;
        js["closed"] = s.closed;
        json pts = json::array();
        for (const auto& p : s.points) pts.push_back({p.lat, p.lng});
        js["points"] = pts;
        sets.push_back(js);
    }
    j["coordsets"] = sets;
    if (n.leaf_element_id) j["leaf_element_id"] = *n.leaf_element_id;
    json children = json::array();
    for (const auto& c : n.children) children.push_back(node_to_json(c));
    j["children"] = children;
    return j;
}

ContextNode node_from_json(const json& j) {
    ContextNode n;
    n.id = j.at("id").get<int>();
    const json jtags = j.value("tags", json::object());
    for (const auto& [k, vals] : jtags.items())
        for (const auto& v : vals) n.tags.emplace_back(k, v.get<std::string>());
    std::sort(n.tags.begin(), n.tags.end());
    for (const auto& jt : j.value("times", json::array())) {
        const auto b = parse_instant(jt.at("begin").get<std::string>());
        const auto e = parse_instant(jt.at("end").get<std::string>());
        if (!b || !e) throw DataError("bad time range in tree json");
        n.times.emplace_back(*b, *e);
    }
    for (const auto& js : j.value("coordsets", json::array())) {
        CoordinateSet s;
        s.closed = js.value("closed", false);
        for (const auto& jp : js.at("points"))
            s.points.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
        n.coordsets.push_back(std::move(s));
    }
    if (j.contains("leaf_element_id")) n.leaf_element_id = j["leaf_element_id"].get<std::string>();
    for (const auto& jc : j.value("children", json::array()))
        n.children.push_back(node_from_json(jc));
    return n;
}

std::string node_label(const ContextNode& n) {
    std::map<std::string, int> key_counts;
    for (const auto& t : n.tags) key_counts[t.key] += 1;
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& [k, c] : key_counts) ranked.emplace_back(-c, k);
    std::sort(ranked.begin(), ranked.end());
    std::string label;
    for (size_t i = 0; i < ranked.size() && i < 2; ++i) {
        if (!label.empty()) label += "\\n";
        label += ranked[i].second;
    }
    if (n.leaf_element_id) {
        if (!label.empty()) label += "\\n";
        label += *n.leaf_element_id;
    }
    if (label.empty()) label = "cluster " + std::to_string(n.id);
    return label;
}

}  // namespace

TagSimMode tag_sim_mode_from_string(const std::string& s) {
    const std::string m = to_lower(s);
    if (m == "keys") return TagSimMode::Keys;
    if (m == "values") return TagSimMode::Values;
    if (m == "combined") return TagSimMode::Combined;
    throw std::invalid_argument("unknown tag similarity mode: " + s);
}

std::string to_string(TagSimMode mode) {
    switch (mode) {
        case TagSimMode::Keys: return "keys";
        case TagSimMode::Values: return "values";
        case TagSimMode::Combined: return "combined";
    }
    return "combined";
}

ContextNode merge_clusters(std::vector<ContextNode> group) {
    ContextNode out;
    out.tags = union_tags(group);
    for (const auto& c : group) out.times = merge_time_ranges(out.times, c.times);

    for (const auto& c : group)
        out.coordsets.insert(out.coordsets.end(), c.coordsets.begin(), c.coordsets.end());

    // Coalesce intersecting shapes into convex hulls, to a fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < out.coordsets.size() && !changed; ++i) {
            for (size_t j = i + 1; j < out.coordsets.size() && !changed; ++j) {
                if (!coordsets_intersect(out.coordsets[i], out.coordsets[j])) continue;
                std::vector<LatLng> combined = out.coordsets[i].points;
                combined.insert(combined.end(), out.coordsets[j].points.begin(),
                                out.coordsets[j].points.end());
                out.coordsets[i] = convex_hull(combined);
                out.coordsets.erase(out.coordsets.begin() + static_cast<long>(j));
                changed = true;
            }
        }
    }

    out.children = std::move(group);
    return out;
}

double wup_similarity(const Taxonomy& tax, const std::string& a, const std::string& b) {
    if (!tax.contains(a) || !tax.contains(b))
        return to_lower(a) == to_lower(b) ? 1.0 : 0.0;
    const int da = tax.depth(a);
    const int db = tax.depth(b);
    const int dl = tax.lcs_depth(a, b);
    return 2.0 * dl / static_cast<double>(da + db);
}

double tag_sim(const std::vector<Tag>& t1, const std::vector<Tag>& t2, const Taxonomy& tax,
               TagSimMode mode) {
    if (t1.empty()) throw EmptyTagSet();
    double sum = 0.0;
    for (const auto& a : t1) {
        double best = 0.0;
        for (const auto& b : t2) best = std::max(best, single_tag_sim(a, b, tax, mode));
        sum += best;
    }
    return sum / static_cast<double>(t1.size());
}

double semantic_similarity(const ContextNode& c1, const ContextNode& c2, const Taxonomy& tax,
                           TagSimMode mode) {
    if (c1.tags.empty() || c2.tags.empty()) return 0.0;
    return std::max(tag_sim(c1.tags, c2.tags, tax, mode),
                    tag_sim(c2.tags, c1.tags, tax, mode));
}

std::set<std::string> feature_strings(const ContextNode& c, const FeatureBinning& b) {
    std::set<std::string> out;
    const size_t n = c.times.size();

    double total_seconds = 0.0;
    for (const auto& r : c.times) total_seconds += static_cast<double>(r.duration());
    const double mean_minutes = n ? total_seconds / static_cast<double>(n) / 60.0 : 0.0;
    const int dur_bin = static_cast<int>(std::floor(std::log2(std::max(1.0, mean_minutes))));
    out.insert("duration_log2m_" + std::to_string(dur_bin));

    // Modal start-of-day bin; ties resolve to the earliest bin.
    std::map<int, int> bin_counts;
    for (const auto& r : c.times) {
        const int hour = static_cast<int>(((r.begin % 86400) + 86400) % 86400 / 3600);
        bin_counts[(hour / b.time_of_day_bin_hours) * b.time_of_day_bin_hours] += 1;
    }
    int modal = 0, modal_count = 0;
    for (const auto& [bin, count] : bin_counts) {
        if (count > modal_count) {
            modal = bin;
            modal_count = count;
        }
    }
    out.insert("timeofday_" + std::to_string(modal));

    const int count_bin = static_cast<int>(
        std::floor(std::log2(std::max<size_t>(1, n))));
    out.insert("count_log2_" + std::to_string(count_bin));

    double total_area = 0.0;
    for (const auto& s : c.coordsets) total_area += area_m2(s);
    if (total_area <= 0.0) {
        out.insert("area_log10_none");
    } else {
        const int area_bin = static_cast<int>(std::floor(std::log10(total_area)));
        out.insert("area_log10_" + std::to_string(area_bin));
    }
    return out;
}

double feature_similarity(const ContextNode& c1, const ContextNode& c2,
                          const FeatureBinning& b) {
    const auto f1 = feature_strings(c1, b);
    const auto f2 = feature_strings(c2, b);
    std::vector<std::string> inter, uni;
    std::set_intersection(f1.begin(), f1.end(), f2.begin(), f2.end(),
                          std::back_inserter(inter));
    std::set_union(f1.begin(), f1.end(), f2.begin(), f2.end(), std::back_inserter(uni));
    if (uni.empty()) return 0.0;
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

double geographical_distance(const ContextNode& c1, const ContextNode& c2) {
    const auto v1 = all_vertices(c1);
    const auto v2 = all_vertices(c2);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : v1)
        for (const auto& b : v2) best = std::min(best, haversine_m(a, b));
    return best;
}

double hcd(const ContextNode& c1, const ContextNode& c2, double lambda, const Taxonomy& tax,
           const FeatureBinning& b, TagSimMode mode) {
    const double sem = semantic_similarity(c1, c2, tax, mode);
    const double feat = feature_similarity(c1, c2, b);
    const double d = 1.0 - (lambda * sem + (1.0 - lambda) * feat);
    return std::clamp(d, 0.0, 1.0);
}

ContextTree build_context_tree(const std::vector<ElementInteraction>& leaves, double lambda,
                               const Taxonomy& tax, const FeatureBinning& binning,
                               TagSimMode mode) {
    if (leaves.empty()) throw DataError("cannot build a context tree from zero interactions");

    std::vector<ContextNode> active;
    active.reserve(leaves.size());
    int next_id = 0;
    for (const auto& ia : leaves) {
        ContextNode leaf;
        leaf.id = next_id++;
        leaf.tags = ia.element.tags;
        leaf.times = merge_time_ranges(ia.times);
        leaf.coordsets = ia.element.coordsets;
        leaf.leaf_element_id = ia.element.id;
        active.push_back(std::move(leaf));
    }

    while (active.size() > 1) {
        const size_t n = active.size();
        double d_min = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) {
                dist[i][j] = hcd(active[i], active[j], lambda, tax, binning, mode);
                d_min = std::min(d_min, dist[i][j]);
            }

        // Every pair at the minimum distance merges this round; pairs
        // sharing a cluster merge together as one group.
        UnionFind uf(n);
        std::vector<char> involved(n, 0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (dist[i][j] <= d_min + kTieEpsilon) {
                    uf.unite(i, j);
                    involved[i] = involved[j] = 1;
                }

        std::map<size_t, std::vector<size_t>> groups;  // min member -> members
        for (size_t i = 0; i < n; ++i)
            if (involved[i]) groups[uf.find(i)].push_back(i);

        std::map<size_t, std::vector<size_t>> ordered;
        for (auto& [root, members] : groups) {
            std::sort(members.begin(), members.end());
            ordered[members.front()] = members;
        }

        std::vector<char> consumed(n, 0);
        std::map<size_t, ContextNode> merged_at;  // position of smallest member
        for (auto& [first, members] : ordered) {
            std::vector<ContextNode> group;
            for (size_t m : members) {
                group.push_back(std::move(active[m]));
                consumed[m] = 1;
            }
            ContextNode node = merge_clusters(std::move(group));
            node.id = next_id++;
            merged_at[first] = std::move(node);
        }

        std::vector<ContextNode> next;
        next.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (auto it = merged_at.find(i); it != merged_at.end())
                next.push_back(std::move(it->second));
            else if (!consumed[i])
                next.push_back(std::move(active[i]));
        }
        active = std::move(next);
    }

    ContextTree tree;
    tree.root = std::move(active.front());
    tree.lambda = lambda;
    tree.binning = binning;
    tree.tag_sim_mode = mode;
    return tree;
}

std::string tree_to_json(const ContextTree& tree) {
    json j;
    j["lambda"] = tree.lambda;
    j["tag_sim_mode"] = to_string(tree.tag_sim_mode);
    j["time_of_day_bin_hours"] = tree.binning.time_of_day_bin_hours;
    j["root"] = node_to_json(tree.root);
    return j.dump(2);
}

ContextTree tree_from_json_stream(std::istream& in, const std::string& name) {
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw MalformedRecord(name, 0, e.what());
    }
    ContextTree tree;
    tree.lambda = j.value("lambda", 0.5);
    tree.tag_sim_mode = tag_sim_mode_from_string(j.value("tag_sim_mode", "combined"));
    tree.binning.time_of_day_bin_hours = j.value("time_of_day_bin_hours", 4);
    tree.root = node_from_json(j.at("root"));
    return tree;
}

ContextTree tree_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    return tree_from_json_stream(in, path);
}

void visit_nodes(const ContextNode& root, const std::function<void(const ContextNode&)>& fn) {
    fn(root);
    for (const auto& c : root.children) visit_nodes(c, fn);
}

std::string tree_to_dot(const ContextTree& tree) {
    std::ostringstream out;
    out << "digraph context_tree {\n";
    out << "  node [shape=box, fontsize=10];\n";
    visit_nodes(tree.root, [&](const ContextNode& n) {
        out << "  n" << n.id << " [label=\"" << node_label(n) << "\"];\n";
    });
    visit_nodes(tree.root, [&](const ContextNode& n) {
        for (const auto& c : n.children) out << "  n" << n.id << " -> n" << c.id << ";\n";
    });
    out << "}\n";
    return out.str();
}

}  // namespace ctree
