#include "ctree/ingest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ctree {

using nlohmann::json;

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Distinct-point count, for polygon validation.
size_t distinct_points(const std::vector<LatLng>& pts) {
    std::set<std::pair<double, double>> seen;
    for (const auto& p : pts) seen.insert({p.lat, p.lng});
    return seen.size();
}

void validate_coordset(const std::string& id, const CoordinateSet& s) {
    if (s.points.empty()) throw MalformedGeometry(id, "coordset with no points");
    if (s.closed && distinct_points(s.points) < 3)
        throw MalformedGeometry(id, "closed coordset needs >= 3 distinct points");
    for (const auto& p : s.points) {
        if (p.lat < -90.0 || p.lat > 90.0 || p.lng < -180.0 || p.lng > 180.0)
            throw MalformedGeometry(id, "coordinate out of range");
    }
}

TrajectoryPoint make_point(Instant ts, double lat, double lng, double accuracy) {
    if (lat < -90.0 || lat > 90.0 || lng < -180.0 || lng > 180.0)
        throw std::invalid_argument("coordinate out of range");
    TrajectoryPoint p;
    p.timestamp = ts;
    p.position = {lat, lng};
    p.accuracy = std::max(accuracy, kMinAccuracyM);
    return p;
}

}  // namespace

Trajectory parse_trajectory_stream(std::istream& in, const std::string& name,
                                   double default_accuracy) {
    Trajectory t;
    std::string line;
    size_t line_no = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty()) continue;
        saw_content = true;
        try {
            if (s.front() == '{') {
                const json j = json::parse(s);
                const auto ts = parse_instant(j.at("timestamp").get<std::string>());
                if (!ts) throw std::invalid_argument("bad timestamp");
                const double acc =
                    j.contains("accuracy") ? j.at("accuracy").get<double>() : default_accuracy;
                t.points.push_back(
                    make_point(*ts, j.at("lat").get<double>(), j.at("lng").get<double>(), acc));
            } else {
                auto fields = split(s, ',');
                for (auto& f : fields) f = trim(f);
                if (line_no == 1 && !fields.empty() && fields[0] == "timestamp") continue;
                if (fields.size() < 3) throw std::invalid_argument("expected at least 3 fields");
                const auto ts = parse_instant(fields[0]);
                if (!ts) throw std::invalid_argument("bad timestamp: " + fields[0]);
                const double lat = std::stod(fields[1]);
                const double lng = std::stod(fields[2]);
                const double acc =
                    fields.size() >= 4 && !fields[3].empty() ? std::stod(fields[3])
                                                             : default_accuracy;
                t.points.push_back(make_point(*ts, lat, lng, acc));
            }
        } catch (const std::exception& e) {
            throw MalformedRecord(name, line_no, e.what());
        }
    }
    if (!saw_content) throw EmptyFile(name);
    std::stable_sort(t.points.begin(), t.points.end(),
                     [](const TrajectoryPoint& a, const TrajectoryPoint& b) {
                         return a.timestamp < b.timestamp;
                     });
    return t;
}

Trajectory parse_trajectory(const std::string& path, double default_accuracy) {
    auto in = open_or_throw(path);
    return parse_trajectory_stream(in, path, default_accuracy);
}

ElementStore parse_land_usage_stream(std::istream& in, const std::string& name) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw MalformedRecord(name, 0, e.what());
    }

    ElementStore store;
    for (const auto& je : doc.value("elements", json::array())) {
        LandUsageElement e;
        e.id = je.at("id").get<std::string>();
        if (store.elements.count(e.id)) throw DuplicateId(e.id);
        const json jtags = je.value("tags", json::object());
        for (const auto& [k, v] : jtags.items()) e.tags.emplace_back(k, v.get<std::string>());
        std::sort(e.tags.begin(), e.tags.end());
        e.tags.erase(std::unique(e.tags.begin(), e.tags.end()), e.tags.end());
        for (const auto& js : je.value("coordsets", json::array())) {
            CoordinateSet s;
            s.closed = js.value("closed", false);
            for (const auto& jp : js.at("points"))
                s.points.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
            validate_coordset(e.id, s);
            e.coordsets.push_back(std::move(s));
        }
        if (e.coordsets.empty()) throw MalformedGeometry(e.id, "element has no coordsets");
        for (const auto& jm : je.value("members", json::array()))
            e.members.push_back(jm.get<std::string>());
        store.elements.emplace(e.id, std::move(e));
    }

    for (const auto& [id, e] : store.elements)
        for (const auto& m : e.members)
            if (!store.elements.count(m)) store.dangling_members.push_back(m);
    return store;
}

ElementStore parse_land_usage(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_land_usage_stream(in, path);
}

Taxonomy Taxonomy::from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges) {
    Taxonomy tax;
    std::set<std::string> words;
    for (const auto& [p, c] : edges) {
        const std::string parent = to_lower(p);
        const std::string child = to_lower(c);
        words.insert(parent);
        words.insert(child);
        if (parent == child) continue;  // self-edge declares a bare word
        auto [it, inserted] = tax.parent_.emplace(child, parent);
        if (!inserted && it->second != parent)
            throw DataError("taxonomy word has two parents: " + child);
    }

    std::string root;
    for (const auto& w : words) {
        if (!tax.parent_.count(w)) {
            if (!root.empty()) throw MultipleRoots(root, w);
            root = w;
        }
    }
    if (root.empty() && !words.empty()) throw CycleDetected(*words.begin());
    tax.root_ = root;
    if (!root.empty()) tax.parent_[root] = root;

    // Depths by walking parent chains; a chain that never reaches the
    // root within |words| steps is cyclic.
    for (const auto& w : words) {
        int steps = 0;
        std::string cur = w;
        while (cur != root) {
            cur = tax.parent_.at(cur);
            if (++steps > static_cast<int>(words.size())) throw CycleDetected(w);
        }
        tax.depth_[w] = steps + 1;
    }
    return tax;
}

bool Taxonomy::contains(const std::string& word) const {
    return depth_.count(to_lower(word)) > 0;
}

int Taxonomy::depth(const std::string& word) const {
    auto it = depth_.find(to_lower(word));
    return it == depth_.end() ? 0 : it->second;
}

std::optional<std::string> Taxonomy::parent(const std::string& word) const {
    const std::string w = to_lower(word);
    auto it = parent_.find(w);
    if (it == parent_.end() || it->second == w) return std::nullopt;
    return it->second;
}

int Taxonomy::lcs_depth(const std::string& a, const std::string& b) const {
    std::string x = to_lower(a), y = to_lower(b);
    if (!depth_.count(x) || !depth_.count(y)) return 0;
    int dx = depth_.at(x), dy = depth_.at(y);
    while (dx > dy) {
        x = parent_.at(x);
        --dx;
    }
    while (dy > dx) {
        y = parent_.at(y);
        --dy;
    }
    while (x != y) {
        x = parent_.at(x);
        y = parent_.at(y);
        --dx;
    }
    return dx;
}

std::vector<std::pair<std::string, std::string>> Taxonomy::edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [child, parent] : parent_)
        if (child != parent) out.emplace_back(parent, child);
    std::sort(out.begin(), out.end());
    return out;
}

Taxonomy parse_taxonomy_stream(std::istream& in, const std::string& name) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::string lone_word;
    std::string line;
    size_t line_no = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::stringstream ss(line);
        std::string parent, child, extra;
        if (!(ss >> parent)) continue;
        saw_content = true;
        if (!(ss >> child)) {
            lone_word = to_lower(parent);
            continue;
        }
        if (ss >> extra) throw MalformedRecord(name, line_no, "expected `parent child`");
        edges.emplace_back(parent, child);
    }
    if (!saw_content) throw EmptyFile(name);
    if (edges.empty()) {
        // Root-only taxonomy.
        return Taxonomy::from_edges({{lone_word, lone_word}});
    }
    return Taxonomy::from_edges(edges);
}

Taxonomy parse_taxonomy(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_taxonomy_stream(in, path);
}

std::string serialize_trajectory_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "timestamp,lat,lng,accuracy\n";
    out.precision(10);
    for (const auto& p : t.points)
        out << format_instant(p.timestamp) << ',' << p.position.lat << ',' << p.position.lng
            << ',' << p.accuracy << '\n';
    return out.str();
}

std::string serialize_land_usage(const ElementStore& store) {
    json elements = json::array();
    for (const auto& [id, e] : store.elements) {
        json je;
        je["id"] = id;
        json tags = json::object();
        for (const auto& t : e.tags) tags[t.key] = t.value;
        je["tags"] = tags;
        json sets = json::array();
        for (const auto& s : e.coordsets) {
            json js;
            js["closed"] = s.closed;
            json pts = json::array();
            for (const auto& p : s.points) pts.push_back({p.lat, p.lng});
            js["points"] = pts;
            sets.push_back(js);
        }
        je["coordsets"] = sets;
        if (!e.members.empty()) je["members"] = e.members;
        elements.push_back(je);
    }
    return json{{"elements", elements}}.dump(2);
}

std::string serialize_taxonomy(const Taxonomy& tax) {
    std::ostringstream out;
    const auto edges = tax.edges();
    if (edges.empty()) {
        out << tax.root() << '\n';
        return out.str();
    }
    for (const auto& [p, c] : edges) out << p << ' ' << c << '\n';
    return out.str();
}

}  // namespace ctree
