#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ctree/core.hpp"
#include "ctree/ingest.hpp"

namespace ctree {

/// A trajectory point plus the ids of every element intersecting its
/// accuracy radius.
struct AugmentedPoint {
    TrajectoryPoint point;
    std::vector<std::string> element_ids;  // sorted, unique
};

/// Uniform grid over element bounding boxes. Queries return a superset
/// of the elements whose geometry intersects the query box (no false
/// negatives); callers confirm geometrically.
class SpatialIndex {
public:
    static constexpr double kDefaultCellM = 250.0;

    explicit SpatialIndex(const ElementStore& store, double cell_m = kDefaultCellM);

    /// Ids of all elements whose bounding box may intersect the box
    /// [min_lat,max_lat]x[min_lng,max_lng].
    std::vector<std::string> query_bbox(double min_lat, double min_lng, double max_lat,
                                        double max_lng) const;

    /// Candidates for a circle query: bbox inflated by the radius.
    std::vector<std::string> query_circle(const LatLng& center, double radius_m) const;

private:
    struct Bbox {
        double min_lat, min_lng, max_lat, max_lng;
    };

    std::pair<long, long> cell_of(double lat, double lng) const;

    double cell_lat_deg_ = 1.0;
    double cell_lng_deg_ = 1.0;
    std::unordered_map<std::string, std::vector<size_t>> grid_;  // "r:c" -> element idx
    std::vector<std::string> ids_;
    std::vector<Bbox> boxes_;
};

/// Exactly the elements whose geometry intersects the accuracy circle
/// of `p`. Candidates come from the index, confirmed geometrically.
std::vector<std::string> extract_elements(const TrajectoryPoint& p, const SpatialIndex& index,
                                          const ElementStore& store);

/// One AugmentedPoint per input point, order preserved.
std::vector<AugmentedPoint> augment_trajectory(const Trajectory& t, const SpatialIndex& index,
                                               const ElementStore& store);

/// JSON-lines serialization of augmented points:
///   {"timestamp":"...","lat":..,"lng":..,"accuracy":..,"data":[ids]}
std::string serialize_augmented(const std::vector<AugmentedPoint>& points);
std::vector<AugmentedPoint> parse_augmented(const std::string& path);
std::vector<AugmentedPoint> parse_augmented_stream(std::istream& in, const std::string& name);

}  // namespace ctree
