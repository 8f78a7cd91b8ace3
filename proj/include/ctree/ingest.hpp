#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctree/core.hpp"
#include "ctree/errors.hpp"

namespace ctree {

/// Immutable collection of land-usage elements keyed by id.
struct ElementStore {
    std::map<std::string, LandUsageElement> elements;
    std::vector<std::string> dangling_members;  // member ids that did not resolve

    const LandUsageElement* find(const std::string& id) const {
        auto it = elements.find(id);
        return it == elements.end() ? nullptr : &it->second;
    }
};

/// Rooted word hierarchy for Wu-Palmer similarity. Depth of the root is 1.
class Taxonomy {
public:
    Taxonomy() = default;

    /// Build from (parent, child) edges. A node appearing only as a parent
    /// becomes the root candidate; exactly one root is required.
    static Taxonomy from_edges(const std::vector<std::pair<std::string, std::string>>& edges);

    bool contains(const std::string& word) const;
    int depth(const std::string& word) const;  // 0 when absent
    std::optional<std::string> parent(const std::string& word) const;
    const std::string& root() const { return root_; }
    size_t size() const { return parent_.size(); }

    /// Depth of the least common subsumer; 0 when either word is absent.
    int lcs_depth(const std::string& a, const std::string& b) const;

    /// (parent, child) edges, sorted; empty for a root-only taxonomy.
    std::vector<std::pair<std::string, std::string>> edges() const;

private:
    std::map<std::string, std::string> parent_;  // root maps to itself
    std::map<std::string, int> depth_;
    std::string root_;
};

/// Parse `timestamp,lat,lng[,accuracy]` CSV (header optional) or a
/// JSON-lines file of {"timestamp","lat","lng","accuracy"} objects.
/// Points are sorted by timestamp (stable); accuracy is clamped to
/// >= 1 m; a missing accuracy column is filled with `default_accuracy`.
Trajectory parse_trajectory(const std::string& path, double default_accuracy = 10.0);
Trajectory parse_trajectory_stream(std::istream& in, const std::string& name,
                                   double default_accuracy = 10.0);

/// Parse the land-usage JSON document:
///   {"elements":[{"id","tags":{k:v},"coordsets":[{"closed","points":[[lat,lng],..]}],
///                 "members":[..]}]}
ElementStore parse_land_usage(const std::string& path);
ElementStore parse_land_usage_stream(std::istream& in, const std::string& name);

/// Parse the `parent child` edge-list taxonomy (one edge per line,
/// '#' comments, a single bare word defines a root-only taxonomy).
Taxonomy parse_taxonomy(const std::string& path);
Taxonomy parse_taxonomy_stream(std::istream& in, const std::string& name);

std::string serialize_trajectory_csv(const Trajectory& t);
std::string serialize_land_usage(const ElementStore& store);
std::string serialize_taxonomy(const Taxonomy& tax);

}  // namespace ctree
