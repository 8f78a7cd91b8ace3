#include "ctree/augment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctree/errors.hpp"

namespace ctree {

using nlohmann::json;

namespace {

constexpr double kMetersPerDegLat = kEarthRadiusM * std::numbers::pi / 180.0;

std::string cell_key(long r, long c) {
    return std::to_string(r) + ":" + std::to_string(c);
}

}  // namespace

SpatialIndex::SpatialIndex(const ElementStore& store, double cell_m) {
    // Reference latitude for the longitude cell width: mean of element
    // latitudes, so cells are roughly square over the dataset extent.
    double lat_sum = 0.0;
    size_t lat_n = 0;
    for (const auto& [id, e] : store.elements)
        for (const auto& s : e.coordsets)
            for (const auto& p : s.points) {
                lat_sum += p.lat;
                ++lat_n;
            }
    const double ref_lat = lat_n ? lat_sum / static_cast<double>(lat_n) : 0.0;
    const double cos_ref = std::max(0.01, std::cos(ref_lat * std::numbers::pi / 180.0));
    cell_lat_deg_ = cell_m / kMetersPerDegLat;
    cell_lng_deg_ = cell_m / (kMetersPerDegLat * cos_ref);

    for (const auto& [id, e] : store.elements) {
        Bbox box{90.0, 180.0, -90.0, -180.0};
        for (const auto& s : e.coordsets)
            for (const auto& p : s.points) {
                box.min_lat = std::min(box.min_lat, p.lat);
                box.min_lng = std::min(box.min_lng, p.lng);
                box.max_lat = std::max(box.max_lat, p.lat);
                box.max_lng = std::max(box.max_lng, p.lng);
            }
        const size_t idx = ids_.size();
        ids_.push_back(id);
        boxes_.push_back(box);

        const auto [r0, c0] = cell_of(box.min_lat, box.min_lng);
        const auto [r1, c1] = cell_of(box.max_lat, box.max_lng);
        for (long r = r0; r <= r1; ++r)
            for (long c = c0; c <= c1; ++c) grid_[cell_key(r, c)].push_back(idx);
    }
}

std::pair<long, long> SpatialIndex::cell_of(double lat, double lng) const {
    return {static_cast<long>(std::floor(lat / cell_lat_deg_)),
            static_cast<long>(std::floor(lng / cell_lng_deg_))};
}

std::vector<std::string> SpatialIndex::query_bbox(double min_lat, double min_lng,
                                                  double max_lat, double max_lng) const {
    std::set<size_t> hits;
    const auto [r0, c0] = cell_of(min_lat, min_lng);
    const auto [r1, c1] = cell_of(max_lat, max_lng);
    for (long r = r0; r <= r1; ++r)
        for (long c = c0; c <= c1; ++c) {
            auto it = grid_.find(cell_key(r, c));
            if (it == grid_.end()) continue;
            for (size_t idx : it->second) {
                const Bbox& b = boxes_[idx];
                if (b.max_lat < min_lat || b.min_lat > max_lat || b.max_lng < min_lng ||
                    b.min_lng > max_lng)
                    continue;
                hits.insert(idx);
            }
        }
    std::vector<std::string> out;
    out.reserve(hits.size());
    for (size_t idx : hits) out.push_back(ids_[idx]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> SpatialIndex::query_circle(const LatLng& center,
                                                    double radius_m) const {
    const double dlat = radius_m / kMetersPerDegLat;
    const double cos_lat =
        std::max(0.01, std::cos(center.lat * std::numbers::pi / 180.0));
    const double dlng = radius_m / (kMetersPerDegLat * cos_lat);
    return query_bbox(center.lat - dlat, center.lng - dlng, center.lat + dlat,
                      center.lng + dlng);
}

std::vector<std::string> extract_elements(const TrajectoryPoint& p, const SpatialIndex& index,
                                          const ElementStore& store) {
    std::vector<std::string> out;
    for (const auto& id : index.query_circle(p.position, p.accuracy)) {
        const LandUsageElement* e = store.find(id);
        if (e && circle_intersects_element(p.position, p.accuracy, *e)) out.push_back(id);
    }
    return out;  // query_circle output is already sorted
}

std::vector<AugmentedPoint> augment_trajectory(const Trajectory& t, const SpatialIndex& index,
                                               const ElementStore& store) {
    std::vector<AugmentedPoint> out;
    out.reserve(t.points.size());
    for (const auto& p : t.points) out.push_back({p, extract_elements(p, index, store)});
    return out;
}

std::string serialize_augmented(const std::vector<AugmentedPoint>& points) {
    std::ostringstream out;
    for (const auto& ap : points) {
        json j;
        j["timestamp"] = format_instant(ap.point.timestamp);
        j["lat"] = ap.point.position.lat;
        j["lng"] = ap.point.position.lng;
        j["accuracy"] = ap.point.accuracy;
        j["data"] = ap.element_ids;
        out << j.dump() << '\n';
    }
    return out.str();
}

std::vector<AugmentedPoint> parse_augmented_stream(std::istream& in,
                                                   const std::string& name) {
    std::vector<AugmentedPoint> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            AugmentedPoint ap;
            const auto ts = parse_instant(j.at("timestamp").get<std::string>());
            if (!ts) throw std::invalid_argument("bad timestamp");
            ap.point.timestamp = *ts;
            ap.point.position = {j.at("lat").get<double>(), j.at("lng").get<double>()};
            ap.point.accuracy = std::max(j.at("accuracy").get<double>(), kMinAccuracyM);
            for (const auto& id : j.at("data")) ap.element_ids.push_back(id.get<std::string>());
            std::sort(ap.element_ids.begin(), ap.element_ids.end());
            out.push_back(std::move(ap));
        } catch (const std::exception& e) {
            throw MalformedRecord(name, line_no, e.what());
        }
    }
    return out;
}

std::vector<AugmentedPoint> parse_augmented(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    return parse_augmented_stream(in, path);
}

}  // namespace ctree
