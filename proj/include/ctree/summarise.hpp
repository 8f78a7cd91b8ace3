#pragma once

#include <string>
#include <vector>

#include "ctree/augment.hpp"
#include "ctree/filter.hpp"

namespace ctree {

/// An element plus the continuous time periods the user interacted
/// with it. Ranges are pairwise disjoint and sorted; endpoints are
/// timestamps of points that listed the element.
struct ElementInteraction {
    LandUsageElement element;
    std::vector<TimeRange> times;
};

/// Collapse filtered points into per-element interaction periods.
/// Consecutive listing points with a gap <= t_max form one range; a
/// larger gap splits. Isolated points yield zero-duration ranges.
/// Output ordered by element id.
std::vector<ElementInteraction> summarise(const std::vector<AugmentedPoint>& filtered,
                                          const ElementStore& store, double t_max = 1200.0);

/// JSON document of interactions (id, tags, members, times, coordsets).
std::string serialize_interactions(const std::vector<ElementInteraction>& interactions);
std::vector<ElementInteraction> parse_interactions(const std::string& path);
std::vector<ElementInteraction> parse_interactions_stream(std::istream& in,
                                                          const std::string& name);

}  // namespace ctree
