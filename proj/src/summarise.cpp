#include "ctree/summarise.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ctree/errors.hpp"

namespace ctree {

using nlohmann::json;

std::vector<ElementInteraction> summarise(const std::vector<AugmentedPoint>& filtered,
                                          const ElementStore& store, double t_max) {
    std::map<std::string, std::vector<Instant>> listings;
    for (const auto& ap : filtered)
        for (const auto& id : ap.element_ids) listings[id].push_back(ap.point.timestamp);

    std::vector<ElementInteraction> out;
    for (auto& [id, stamps] : listings) {
        const LandUsageElement* e = store.find(id);
        if (!e) continue;  // augmentation guarantees resolution; be tolerant on re-parse
        ElementInteraction ia;
        ia.element = *e;
        Instant begin = stamps.front();
        Instant last = stamps.front();
        for (size_t i = 1; i < stamps.size(); ++i) {
            if (static_cast<double>(stamps[i] - last) <= t_max) {
                last = stamps[i];
            } else {
                ia.times.emplace_back(begin, last);
                begin = last = stamps[i];
            }
        }
        ia.times.emplace_back(begin, last);
        out.push_back(std::move(ia));
    }
    return out;
}

std::string serialize_interactions(const std::vector<ElementInteraction>& interactions) {
    json arr = json::array();
    for (const auto& ia : interactions) {
        json j;
        j["id"] = ia.element.id;
        json tags = json::object();
        for (const auto& t : ia.element.tags) tags[t.key] = t.value;
        j["tags"] = tags;
        if (!ia.element.members.empty()) j["members"] = ia.element.members;
        json times = json::array();
        for (const auto& r : ia.times)
            times.push_back({{"begin", format_instant(r.begin)}, {"end", format_instant(r.end)}});
        j["times"] = times;
        json sets = json::array();
        for (const auto& s : ia.element.coordsets) {
            json js;
            js["closed"] = s.closed;
            json pts = json::array();
            for (const auto& p : s.points) pts.push_back({p.lat, p.lng});
            js["points"] = pts;
            sets.push_back(js);
        }
        j["coordsets"] = sets;
        arr.push_back(j);
    }
    return arr.dump(2);
}

std::vector<ElementInteraction> parse_interactions_stream(std::istream& in,
                                                          const std::string& name) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw MalformedRecord(name, 0, e.what());
    }
    std::vector<ElementInteraction> out;
    for (const auto& j : doc) {
        ElementInteraction ia;
        ia.element.id = j.at("id").get<std::string>();
        const json jtags = j.value("tags", json::object());
        for (const auto& [k, v] : jtags.items())
            ia.element.tags.emplace_back(k, v.get<std::string>());
        std::sort(ia.element.tags.begin(), ia.element.tags.end());
        for (const auto& m : j.value("members", json::array()))
            ia.element.members.push_back(m.get<std::string>());
        for (const auto& jt : j.at("times")) {
            const auto b = parse_instant(jt.at("begin").get<std::string>());
            const auto e = parse_instant(jt.at("end").get<std::string>());
            if (!b || !e) throw MalformedRecord(name, 0, "bad time range");
            ia.times.emplace_back(*b, *e);
        }
        for (const auto& js : j.value("coordsets", json::array())) {
            CoordinateSet s;
            s.closed = js.value("closed", false);
            for (const auto& jp : js.at("points"))
                s.points.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
            ia.element.coordsets.push_back(std::move(s));
        }
        out.push_back(std::move(ia));
    }
    return out;
}

std::vector<ElementInteraction> parse_interactions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    return parse_interactions_stream(in, path);
}

}  // namespace ctree
