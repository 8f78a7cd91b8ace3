#include "ctree/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace ctree {

namespace {

// City anchor; all geometry is laid out in meters east/north of it.
constexpr double kAnchorLat = 52.0;
constexpr double kAnchorLng = -1.0;
constexpr double kMetersPerDegLat = kEarthRadiusM * std::numbers::pi / 180.0;

struct CityBuilder {
    ElementStore store;
    int next_way = 100;
    int next_node = 100;
    int next_rel = 1;
    double cos_anchor = std::cos(kAnchorLat * std::numbers::pi / 180.0);

    LatLng at(double x_m, double y_m) const {
        return {kAnchorLat + y_m / kMetersPerDegLat,
                kAnchorLng + x_m / (kMetersPerDegLat * cos_anchor)};
    }

    std::string add(const std::string& prefix, std::vector<Tag> tags, CoordinateSet set) {
        LandUsageElement e;
        int& counter = prefix == "n" ? next_node : (prefix == "r" ? next_rel : next_way);
        e.id = prefix + "_" + std::to_string(counter++);
        e.tags = std::move(tags);
        std::sort(e.tags.begin(), e.tags.end());
        e.coordsets.push_back(std::move(set));
        store.elements.emplace(e.id, e);
        return e.id;
    }

    std::string add_box(double cx, double cy, double half, std::vector<Tag> tags) {
        CoordinateSet s;
        s.closed = true;
        s.points = {at(cx - half, cy - half), at(cx + half, cy - half),
                    at(cx + half, cy + half), at(cx - half, cy + half)};
        return add("w", std::move(tags), std::move(s));
    }

    std::string add_line(const std::vector<std::pair<double, double>>& xy,
                         std::vector<Tag> tags) {
        CoordinateSet s;
        s.closed = false;
        for (const auto& [x, y] : xy) s.points.push_back(at(x, y));
        return add("w", std::move(tags), std::move(s));
    }
};

struct Poi {
    std::string id;
    double x, y;  // meters
};

struct City {
    ElementStore store;
    Poi home;
    Poi office;
    std::vector<Poi> shops;
    Poi park;
    Poi friend_house;
    double cos_anchor;

    LatLng at(double x, double y) const {
        return {kAnchorLat + y / kMetersPerDegLat,
                kAnchorLng + x / (kMetersPerDegLat * cos_anchor)};
    }
};

City build_city() {
    CityBuilder b;
    City city;
    city.cos_anchor = b.cos_anchor;

    // Street grid: 5 vertical + 5 horizontal roads, 200 m spacing.
    for (int i = 0; i < 5; ++i) {
        const double c = i * 200.0;
        const std::string kind = i == 2 ? "primary" : "residential";
        b.add_line({{c, -20.0}, {c, 820.0}},
                   {{"highway", kind}, {"surface", "asphalt"}});
        b.add_line({{-20.0, c}, {820.0, c}},
                   {{"highway", kind}, {"surface", "asphalt"}});
    }

    // Bus stops at primary-road intersections.
    for (int i = 0; i < 5; ++i) {
        CoordinateSet s;
        s.closed = false;
        s.points = {b.at(400.0 + 3.0, i * 200.0 + 3.0)};
        b.add("n", {{"highway", "bus_stop"}}, std::move(s));
    }

    // Blocks: (bx,by) covers x in [bx*200, bx*200+200]. Special blocks
    // hold the office park, the shops, and the park; the rest are houses.
    for (int bx = 0; bx < 4; ++bx) {
        for (int by = 0; by < 4; ++by) {
            const double x0 = bx * 200.0;
            const double y0 = by * 200.0;
            if (bx == 3 && by == 3) {
                // Office park: four large buildings.
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        const std::string id =
                            b.add_box(x0 + 60.0 + i * 80.0, y0 + 60.0 + j * 80.0, 28.0,
                                      {{"building", "office"}, {"building_levels", "4"}});
                        if (i == 0 && j == 0) city.office = {id, x0 + 60.0, y0 + 60.0};
                    }
            } else if (bx == 3 && by == 0) {
                // Shopping row.
                static const char* kinds[] = {"supermarket", "bakery", "convenience",
                                              "butcher", "greengrocer", "florist"};
                for (int i = 0; i < 6; ++i) {
                    const double cx = x0 + 30.0 + i * 28.0;
                    const double cy = y0 + 100.0;
                    const std::string id = b.add_box(
                        cx, cy, 11.0, {{"shop", kinds[i]}, {"building", "retail"}});
                    city.shops.push_back({id, cx, cy});
                }
                b.add_box(x0 + 100.0, y0 + 40.0, 35.0, {{"amenity", "parking"}});
            } else if (bx == 0 && by == 3) {
                // Park covering most of the block.
                CoordinateSet s;
                s.closed = true;
                s.points = {b.at(x0 + 20.0, y0 + 20.0), b.at(x0 + 180.0, y0 + 20.0),
                            b.at(x0 + 180.0, y0 + 180.0), b.at(x0 + 20.0, y0 + 180.0)};
                city.park = {b.add("w", {{"leisure", "park"}}, std::move(s)), x0 + 100.0,
                             y0 + 100.0};
                b.add_line({{x0 + 20.0, y0 + 20.0}, {x0 + 180.0, y0 + 180.0}},
                           {{"highway", "footway"}, {"foot", "yes"}});
            } else {
                // Residential block: 4x5 houses of 24 m.
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 5; ++j) {
                        const double cx = x0 + 35.0 + i * 44.0;
                        const double cy = y0 + 30.0 + j * 35.0;
                        const std::string id = b.add_box(
                            cx, cy, 12.0, {{"building", "house"}, {"addr_city", "gridtown"}});
                        if (bx == 0 && by == 0 && i == 0 && j == 0)
                            city.home = {id, cx, cy};
                        if (bx == 2 && by == 1 && i == 3 && j == 2)
                            city.friend_house = {id, cx, cy};
                    }
                CoordinateSet area;
                area.closed = true;
                area.points = {b.at(x0 + 10.0, y0 + 10.0), b.at(x0 + 190.0, y0 + 10.0),
                               b.at(x0 + 190.0, y0 + 190.0), b.at(x0 + 10.0, y0 + 190.0)};
                b.add("r", {{"landuse", "residential"}}, std::move(area));
            }
        }
    }

    city.store = std::move(b.store);
    return city;
}

Taxonomy build_taxonomy() {
    return Taxonomy::from_edges({
        {"entity", "structure"},   {"structure", "building"},
        {"building", "house"},     {"building", "office"},
        {"building", "retail"},    {"building", "garage"},
        {"entity", "way"},         {"way", "highway"},
        {"highway", "primary"},    {"highway", "footway"},
        {"entity", "amenity"},     {"amenity", "shop"},
        {"shop", "supermarket"},   {"shop", "bakery"},
        {"shop", "convenience"},   {"shop", "butcher"},
        {"shop", "greengrocer"},   {"shop", "florist"},
        {"amenity", "parking"},    {"amenity", "fuel"},
        {"entity", "leisure"},     {"leisure", "park"},
        {"leisure", "garden"},     {"entity", "landuse"},
        {"landuse", "residential"},{"landuse", "grass"},
        {"way", "surface"},        {"surface", "asphalt"},
        {"entity", "addr"},
    });
}

struct Segment {
    double begin_s, end_s;          // seconds from local midnight
    std::vector<std::pair<double, double>> waypoints;  // visited in order
    const Poi* stay = nullptr;      // non-null for stationary segments
};

// Manhattan route along the street grid between two points.
std::vector<std::pair<double, double>> route(const Poi& a, const Poi& c) {
    return {{a.x, a.y}, {c.x, a.y}, {c.x, c.y}};
}

std::vector<Segment> daily_routine(const City& city, int day) {
    // Shop choice varies early in the week, then settles; day 1 also
    // adds an evening visit, so later days revisit known elements only.
    const Poi& shop = city.shops[day == 0 ? 0 : (day == 1 ? 1 : day % 2)];
    std::vector<Segment> segs;
    auto stay = [&](double b, double e, const Poi& p) {
        segs.push_back({b, e, {{p.x, p.y}}, &p});
    };
    auto walk = [&](double b, double e, const Poi& from, const Poi& to) {
        segs.push_back({b, e, route(from, to), nullptr});
    };
    stay(0.0, 7.5 * 3600, city.home);
    walk(7.5 * 3600, 8.0 * 3600, city.home, city.office);
    stay(8.0 * 3600, 12.0 * 3600, city.office);
    walk(12.0 * 3600, 12.3 * 3600, city.office, shop);
    stay(12.3 * 3600, 12.8 * 3600, shop);
    walk(12.8 * 3600, 13.1 * 3600, shop, city.office);
    stay(13.1 * 3600, 17.0 * 3600, city.office);
    walk(17.0 * 3600, 17.3 * 3600, city.office, city.park);
    stay(17.3 * 3600, 18.5 * 3600, city.park);
    if (day == 1) {
        walk(18.5 * 3600, 18.8 * 3600, city.park, city.friend_house);
        stay(18.8 * 3600, 20.5 * 3600, city.friend_house);
        walk(20.5 * 3600, 21.0 * 3600, city.friend_house, city.home);
        stay(21.0 * 3600, 24.0 * 3600, city.home);
    } else {
        walk(18.5 * 3600, 19.0 * 3600, city.park, city.home);
        stay(19.0 * 3600, 24.0 * 3600, city.home);
    }
    return segs;
}

std::pair<double, double> position_at(const Segment& seg, double t) {
    if (seg.waypoints.size() == 1) return seg.waypoints.front();
    // Constant-speed interpolation along the waypoint chain.
    double total = 0.0;
    for (size_t i = 0; i + 1 < seg.waypoints.size(); ++i)
        total += std::hypot(seg.waypoints[i + 1].first - seg.waypoints[i].first,
                            seg.waypoints[i + 1].second - seg.waypoints[i].second);
    const double frac = (t - seg.begin_s) / (seg.end_s - seg.begin_s);
    double target = frac * total;
    for (size_t i = 0; i + 1 < seg.waypoints.size(); ++i) {
        const double leg = std::hypot(seg.waypoints[i + 1].first - seg.waypoints[i].first,
                                      seg.waypoints[i + 1].second - seg.waypoints[i].second);
        if (target <= leg || i + 2 == seg.waypoints.size()) {
            const double f = leg > 0.0 ? std::clamp(target / leg, 0.0, 1.0) : 0.0;
            return {seg.waypoints[i].first +
                        f * (seg.waypoints[i + 1].first - seg.waypoints[i].first),
                    seg.waypoints[i].second +
                        f * (seg.waypoints[i + 1].second - seg.waypoints[i].second)};
        }
        target -= leg;
    }
    return seg.waypoints.back();
}

}  // namespace

SynthData synthesize(std::uint64_t seed, const SynthSpec& spec) {
    SynthData data;
    City city = build_city();
    data.taxonomy = build_taxonomy();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spec.position_noise_m);
    std::uniform_real_distribution<double> acc_jitter(0.0, spec.accuracy_jitter_m);

    const Instant epoch_day0 = 1700006400;  // 2023-11-15T00:00:00Z

    for (int day = 0; day < spec.days; ++day) {
        const auto segs = daily_routine(city, day);
        const Instant day_start = epoch_day0 + static_cast<Instant>(day) * 86400;
        for (const auto& seg : segs) {
            if (seg.stay) {
                data.visits.push_back(
                    {seg.stay->id,
                     TimeRange(day_start + static_cast<Instant>(seg.begin_s),
                               day_start + static_cast<Instant>(seg.end_s))});
            }
        }
        for (double t = 0.0; t < 86400.0; t += spec.sample_interval_s) {
            const Segment* seg = nullptr;
            for (const auto& s : segs)
                if (t >= s.begin_s && t < s.end_s) {
                    seg = &s;
                    break;
                }
            if (!seg) continue;
            auto [x, y] = position_at(*seg, t);
            x += noise(rng);
            y += noise(rng);
            TrajectoryPoint p;
            p.timestamp = day_start + static_cast<Instant>(t);
            p.position = city.at(x, y);
            p.accuracy = std::max(kMinAccuracyM, spec.base_accuracy_m + acc_jitter(rng));
            data.trajectory.points.push_back(p);
        }
    }

    data.elements = std::move(city.store);
    return data;
}

std::string serialize_visits(const std::vector<SynthVisit>& visits) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : visits)
        arr.push_back({{"element_id", v.element_id},
                       {"begin", format_instant(v.when.begin)},
                       {"end", format_instant(v.when.end)}});
    return arr.dump(2);
}

}  // namespace ctree
