#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctree/augment.hpp"

namespace ctree {

struct FilterParams {
    double delta = 1200.0;    // buffer half-width in seconds
    double threshold = 0.8;   // normalised-score cutoff t, in [0,1]
    bool edge_windows = false;  // also emit boundary points with partial windows
};

/// An ordered slice of augmented points with the point under
/// consideration at `index`.
struct BufferWindow {
    std::span<const AugmentedPoint> points;
    size_t index = 0;
};

/// Weighted score for every element appearing in the window:
///   Score(e) = [sum over listing points of (1/a_p)(1 - dist/delta)] * |P_e|
/// with dist the absolute temporal distance to the point under
/// consideration, in seconds.
std::map<std::string, double> score_elements(const BufferWindow& w, double delta);

/// Divide by the maximum; throws AllZero when no element scores > 0.
std::map<std::string, double> normalise_scores(const std::map<std::string, double>& scores);

/// Strict threshold: { e : norm[e] > t }.
std::set<std::string> select_elements(const std::map<std::string, double>& norm, double t);

/// Run the temporal-buffer filter over a time-sorted augmented
/// trajectory. Leading points are consumed as context only and
/// trailing points are never emitted; `edge_windows` opts into
/// emitting them using partial windows.
std::vector<AugmentedPoint> filter_trajectory(const std::vector<AugmentedPoint>& aug,
                                              const FilterParams& params);

}  // namespace ctree
