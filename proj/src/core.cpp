#include "ctree/core.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <numbers>

namespace ctree {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double cross(const LocalProjection::XY& o, const LocalProjection::XY& a,
             const LocalProjection::XY& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double point_segment_distance(const LocalProjection::XY& p,
                              const LocalProjection::XY& a,
                              const LocalProjection::XY& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double px = a.x + t * dx - p.x;
    const double py = a.y + t * dy - p.y;
    return std::hypot(px, py);
}

int orientation(const LocalProjection::XY& a, const LocalProjection::XY& b,
                const LocalProjection::XY& c) {
    const double v = cross(a, b, c);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool on_segment(const LocalProjection::XY& a, const LocalProjection::XY& b,
                const LocalProjection::XY& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const LocalProjection::XY& p1,
                        const LocalProjection::XY& p2,
                        const LocalProjection::XY& q1,
                        const LocalProjection::XY& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

// Edges of a coordset: consecutive pairs, plus the closing edge for
// closed sets. A single point yields no edges.
std::vector<std::pair<size_t, size_t>> edge_indices(const CoordinateSet& s) {
    std::vector<std::pair<size_t, size_t>> edges;
    const size_t n = s.points.size();
    for (size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    if (s.closed && n >= 3) edges.emplace_back(n - 1, 0);
    return edges;
}

}  // namespace

Tag::Tag(std::string k, std::string v)
    : key(to_lower(std::move(k))), value(to_lower(std::move(v))) {
    if (key.empty()) throw std::invalid_argument("Tag: empty key");
}

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<TimeRange> merge_time_ranges(std::vector<TimeRange> ranges) {
    if (ranges.empty()) return ranges;
    std::sort(ranges.begin(), ranges.end());
    std::vector<TimeRange> out;
    out.push_back(ranges.front());
    for (size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i].begin <= out.back().end) {
            out.back().end = std::max(out.back().end, ranges[i].end);
        } else {
            out.push_back(ranges[i]);
        }
    }
    return out;
}

std::vector<TimeRange> merge_time_ranges(const std::vector<TimeRange>& a,
                                         const std::vector<TimeRange>& b) {
    std::vector<TimeRange> all = a;
    all.insert(all.end(), b.begin(), b.end());
    return merge_time_ranges(std::move(all));
}

double haversine_m(const LatLng& a, const LatLng& b) {
    const double lat1 = a.lat * kDegToRad;
    const double lat2 = b.lat * kDegToRad;
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlng = (b.lng - a.lng) * kDegToRad;
    const double s = std::sin(dlat / 2);
    const double t = std::sin(dlng / 2);
    const double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LocalProjection::LocalProjection(const LatLng& center)
    : lat0(center.lat), lng0(center.lng), cos_lat0(std::cos(center.lat * kDegToRad)) {}

LocalProjection::XY LocalProjection::project(const LatLng& p) const {
    return {kEarthRadiusM * (p.lng - lng0) * kDegToRad * cos_lat0,
            kEarthRadiusM * (p.lat - lat0) * kDegToRad};
}

LatLng centroid(const std::vector<LatLng>& points) {
    if (points.empty()) return {};
    double lat = 0.0, lng = 0.0;
    for (const auto& p : points) {
        lat += p.lat;
        lng += p.lng;
    }
    const double n = static_cast<double>(points.size());
    return {lat / n, lng / n};
}

CoordinateSet convex_hull(const std::vector<LatLng>& points) {
    const LocalProjection proj(centroid(points));

    struct Indexed {
        LocalProjection::XY xy;
        size_t idx;
    };
    std::vector<Indexed> pts;
    pts.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i) pts.push_back({proj.project(points[i]), i});
    std::sort(pts.begin(), pts.end(), [](const Indexed& a, const Indexed& b) {
        return a.xy.x != b.xy.x ? a.xy.x < b.xy.x : a.xy.y < b.xy.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Indexed& a, const Indexed& b) {
                              return a.xy.x == b.xy.x && a.xy.y == b.xy.y;
                          }),
              pts.end());

    // Andrew monotone chain; result is counter-clockwise.
    std::vector<Indexed> hull;
    if (pts.size() >= 3) {
        hull.resize(2 * pts.size());
        size_t k = 0;
        for (const auto& p : pts) {
            while (k >= 2 && cross(hull[k - 2].xy, hull[k - 1].xy, p.xy) <= 0) --k;
            hull[k++] = p;
        }
        const size_t lower = k + 1;
        for (size_t i = pts.size() - 1; i-- > 0;) {
            while (k >= lower && cross(hull[k - 2].xy, hull[k - 1].xy, pts[i].xy) <= 0) --k;
            hull[k++] = pts[i];
        }
        hull.resize(k - 1);
    }

    CoordinateSet out;
    if (hull.size() >= 3) {
        out.closed = true;
        for (const auto& h : hull) out.points.push_back(points[h.idx]);
    } else {
        // Degenerate input: fewer than 3 distinct non-collinear points.
        out.closed = false;
        out.points = points;
    }
    return out;
}

bool point_in_polygon(const LocalProjection::XY& p,
                      const std::vector<LocalProjection::XY>& poly) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if (point_segment_distance(p, a, b) == 0.0) return true;  // boundary
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool coordsets_intersect(const CoordinateSet& a, const CoordinateSet& b) {
    std::vector<LatLng> all = a.points;
    all.insert(all.end(), b.points.begin(), b.points.end());
    const LocalProjection proj(centroid(all));

    std::vector<LocalProjection::XY> pa, pb;
    for (const auto& p : a.points) pa.push_back(proj.project(p));
    for (const auto& p : b.points) pb.push_back(proj.project(p));

    const auto ea = edge_indices(a);
    const auto eb = edge_indices(b);
    for (const auto& [i1, i2] : ea)
        for (const auto& [j1, j2] : eb)
            if (segments_intersect(pa[i1], pa[i2], pb[j1], pb[j2])) return true;

    // Single-point sets have no edges; compare points directly.
    if (ea.empty() && eb.empty())
        for (const auto& p : pa)
            for (const auto& q : pb)
                if (p.x == q.x && p.y == q.y) return true;

    // Containment: one shape entirely inside the other.
    if (b.closed && b.points.size() >= 3 && !pa.empty() && point_in_polygon(pa[0], pb))
        return true;
    if (a.closed && a.points.size() >= 3 && !pb.empty() && point_in_polygon(pb[0], pa))
        return true;
    return false;
}

double area_m2(const CoordinateSet& s) {
    if (!s.closed || s.points.size() < 3) return 0.0;
    const LocalProjection proj(centroid(s.points));
    double sum = 0.0;
    const size_t n = s.points.size();
    for (size_t i = 0; i < n; ++i) {
        const auto p = proj.project(s.points[i]);
        const auto q = proj.project(s.points[(i + 1) % n]);
        sum += p.x * q.y - q.x * p.y;
    }
    return std::abs(sum) / 2.0;
}

bool circle_intersects_element(const LatLng& center, double radius_m,
                               const LandUsageElement& e) {
    for (const auto& s : e.coordsets) {
        for (const auto& p : s.points)
            if (haversine_m(center, p) <= radius_m) return true;

        const LocalProjection proj(center);
        std::vector<LocalProjection::XY> xs;
        xs.reserve(s.points.size());
        for (const auto& p : s.points) xs.push_back(proj.project(p));

        const LocalProjection::XY c{0.0, 0.0};
        bool segment_hit = false;
        for (const auto& [i, j] : edge_indices(s)) {
            if (point_segment_distance(c, xs[i], xs[j]) <= radius_m) {
                segment_hit = true;
                break;
            }
        }
        if (segment_hit) return true;

        if (s.closed && s.points.size() >= 3 && point_in_polygon(c, xs)) return true;
    }
    return false;
}

std::optional<Instant> parse_instant(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char sep = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &se) != 7)
        return std::nullopt;
    if (sep != 'T' && sep != ' ') return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
        return std::nullopt;
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = se;
    return static_cast<Instant>(timegm(&tm));
}

std::string format_instant(Instant t) {
    std::tm tm{};
    const time_t tt = static_cast<time_t>(t);
    gmtime_r(&tt, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace ctree
