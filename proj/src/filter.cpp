#include "ctree/filter.hpp"

#include <cmath>
#include <optional>

#include "ctree/errors.hpp"

namespace ctree {

namespace {

double time_between(const AugmentedPoint& a, const AugmentedPoint& b) {
    return std::abs(static_cast<double>(a.point.timestamp - b.point.timestamp));
}

AugmentedPoint apply_window(std::span<const AugmentedPoint> window, size_t rel_index,
                            const FilterParams& params) {
    AugmentedPoint out;
    out.point = window[rel_index].point;
    const auto scores = score_elements({window, rel_index}, params.delta);
    try {
        const auto norm = normalise_scores(scores);
        const auto selected = select_elements(norm, params.threshold);
        out.element_ids.assign(selected.begin(), selected.end());
    } catch (const AllZero&) {
        // Window carries no positively weighted element; emit with none.
    }
    return out;
}

}  // namespace

std::map<std::string, double> score_elements(const BufferWindow& w, double delta) {
    const AugmentedPoint& center = w.points[w.index];
    std::map<std::string, double> weighted;  // inner sum
    std::map<std::string, int> counts;       // |P_e|
    for (const auto& p : w.points) {
        const double dist = time_between(p, center);
        const double weight = (1.0 / p.point.accuracy) * (1.0 - dist / delta);
        for (const auto& id : p.element_ids) {
            weighted[id] += weight;
            counts[id] += 1;
        }
    }
    std::map<std::string, double> scores;
    for (const auto& [id, sum] : weighted) scores[id] = sum * counts[id];
    return scores;
}

std::map<std::string, double> normalise_scores(const std::map<std::string, double>& scores) {
    double max_score = 0.0;
    for (const auto& [id, s] : scores) max_score = std::max(max_score, s);
    if (max_score <= 0.0) throw AllZero();
    std::map<std::string, double> out;
    for (const auto& [id, s] : scores) out[id] = s / max_score;
    return out;
}

std::set<std::string> select_elements(const std::map<std::string, double>& norm, double t) {
    std::set<std::string> out;
    for (const auto& [id, s] : norm)
        if (s > t) out.insert(id);
    return out;
}

std::vector<AugmentedPoint> filter_trajectory(const std::vector<AugmentedPoint>& aug,
                                              const FilterParams& params) {
    const size_t n = aug.size();
    std::vector<char> emitted(n, 0);
    std::vector<std::pair<size_t, AugmentedPoint>> out;

    if (n > 1) {
        const std::span<const AugmentedPoint> all(aug);
        // Buffer is aug[lo, hi); idx is the point under consideration.
        size_t lo = 0, hi = 1;
        std::optional<size_t> idx;

        // Build the initial buffer: fill the first half until the next
        // point exceeds delta from the front, then fill the second half.
        while (hi < n) {
            if (!idx && time_between(aug[lo], aug[hi]) > params.delta) {
                idx = hi - 1;
            } else if (idx && time_between(aug[*idx], aug[hi]) > params.delta) {
                break;
            } else {
                ++hi;
            }
        }

        if (idx) {
            while (hi < n) {
                out.emplace_back(*idx, apply_window(all.subspan(lo, hi - lo), *idx - lo, params));
                emitted[*idx] = 1;
                ++*idx;
                if (*idx == hi) ++hi;  // pull the point under consideration in
                while (time_between(aug[lo], aug[*idx]) > params.delta) ++lo;
                while (hi < n && time_between(aug[*idx], aug[hi]) <= params.delta) ++hi;
            }
        }
    }

    if (params.edge_windows) {
        // Boundary points the buffer walk never emitted, scored against
        // partial windows of everything within delta.
        for (size_t i = 0; i < n; ++i) {
            if (emitted[i]) continue;
            size_t lo = i, hi = i + 1;
            while (lo > 0 && time_between(aug[lo - 1], aug[i]) <= params.delta) --lo;
            while (hi < n && time_between(aug[hi], aug[i]) <= params.delta) ++hi;
            const std::span<const AugmentedPoint> window(aug.data() + lo, hi - lo);
            out.emplace_back(i, apply_window(window, i - lo, params));
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    std::vector<AugmentedPoint> result;
    result.reserve(out.size());
    for (auto& [pos, ap] : out) result.push_back(std::move(ap));
    return result;
}

}  // namespace ctree
