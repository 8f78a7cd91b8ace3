#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctree {

/// Seconds since the Unix epoch, always UTC.
using Instant = std::int64_t;

/// Mean Earth radius in meters, used by every geodesic computation.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Positional accuracies below this are clamped at ingest.
inline constexpr double kMinAccuracyM = 1.0;

struct LatLng {
    double lat = 0.0;
    double lng = 0.0;

    friend bool operator==(const LatLng& a, const LatLng& b) {
        return a.lat == b.lat && a.lng == b.lng;
    }
};

struct TrajectoryPoint {
    Instant timestamp = 0;
    LatLng position;
    double accuracy = kMinAccuracyM;  // meters, >= kMinAccuracyM
};

/// Temporally ordered sequence of points. May be empty.
struct Trajectory {
    std::vector<TrajectoryPoint> points;
};

/// A key:value pair describing a property of a land-usage element.
/// Comparison is case-insensitive on both parts; tags are normalised
/// to lower case at construction.
struct Tag {
    std::string key;
    std::string value;  // may be empty

    Tag() = default;
    Tag(std::string k, std::string v);

    friend bool operator==(const Tag& a, const Tag& b) {
        return a.key == b.key && a.value == b.value;
    }
    friend bool operator<(const Tag& a, const Tag& b) {
        return a.key != b.key ? a.key < b.key : a.value < b.value;
    }
};

/// Closed interval of instants; zero-duration ranges are permitted.
struct TimeRange {
    Instant begin = 0;
    Instant end = 0;

    TimeRange() = default;
    TimeRange(Instant b, Instant e) : begin(b), end(e) {
        if (b > e) throw std::invalid_argument("TimeRange: begin > end");
    }

    Instant duration() const { return end - begin; }

    friend bool operator==(const TimeRange& a, const TimeRange& b) {
        return a.begin == b.begin && a.end == b.end;
    }
    friend bool operator<(const TimeRange& a, const TimeRange& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
    }
};

/// Polygon (closed) or polyline (open) in geographic coordinates.
struct CoordinateSet {
    std::vector<LatLng> points;
    bool closed = false;

    friend bool operator==(const CoordinateSet& a, const CoordinateSet& b) {
        return a.closed == b.closed && a.points == b.points;
    }
};

/// A real-world entity: postbox, field, building, road, area...
struct LandUsageElement {
    std::string id;  // e.g. "n_312873295", "w_145179860", "r_2437023"
    std::vector<Tag> tags;      // sorted, unique
    std::vector<CoordinateSet> coordsets;  // at least one
    std::vector<std::string> members;      // ids of constituent elements
};

// ---------------------------------------------------------------------------
// Time-interval algebra

/// Minimal set of maximal ranges covering the union of `a` and `b`.
/// Ranges that overlap or touch are combined. Output sorted by begin.
std::vector<TimeRange> merge_time_ranges(const std::vector<TimeRange>& a,
                                         const std::vector<TimeRange>& b);

/// Normalise a single set of ranges (sort + coalesce).
std::vector<TimeRange> merge_time_ranges(std::vector<TimeRange> ranges);

// ---------------------------------------------------------------------------
// Geometry

/// Great-circle distance in meters (Haversine, mean Earth radius).
double haversine_m(const LatLng& a, const LatLng& b);

/// Local equirectangular projection in meters centered at a reference
/// coordinate. Adequate for the small extents of land-usage elements.
struct LocalProjection {
    double lat0 = 0.0;
    double lng0 = 0.0;
    double cos_lat0 = 1.0;

    explicit LocalProjection(const LatLng& center);

    struct XY {
        double x = 0.0;
        double y = 0.0;
    };
    XY project(const LatLng& p) const;
};

/// Centroid of a point cloud, used as the projection reference.
LatLng centroid(const std::vector<LatLng>& points);

/// Counter-clockwise convex hull computed in a local projection
/// centered at the centroid. Fewer than 3 non-collinear points yield
/// a degenerate open set of the inputs.
CoordinateSet convex_hull(const std::vector<LatLng>& points);

/// True iff any segment pair intersects or one set's point lies inside
/// the other closed set.
bool coordsets_intersect(const CoordinateSet& a, const CoordinateSet& b);

/// Shoelace area in the local projection; open sets have area 0.
double area_m2(const CoordinateSet& s);

/// True iff any coordset of `e` has a vertex within `radius_m`, a
/// segment within `radius_m`, or (closed set) contains `center`.
bool circle_intersects_element(const LatLng& center, double radius_m,
                               const LandUsageElement& e);

/// Point containment for closed sets, evaluated in the given projection.
bool point_in_polygon(const LocalProjection::XY& p,
                      const std::vector<LocalProjection::XY>& poly);

// ---------------------------------------------------------------------------
// Time formatting (all UTC)

/// Parse "YYYY-MM-DDTHH:MM:SS" / "YYYY-MM-DD HH:MM:SS", optional
/// fractional seconds (truncated) and optional trailing "Z" / " Z".
std::optional<Instant> parse_instant(const std::string& text);

/// Render as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_instant(Instant t);

/// Lower-case a string (ASCII).
std::string to_lower(std::string s);

}  // namespace ctree
