#include "versa/snapshot.hpp"

#include "versa/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace versa {

using nlohmann::json;

namespace {

json rect_json(const geometry::Rect& r) { return json::array({r.min_x, r.min_y, r.max_x, r.max_y}); }

geometry::Rect rect_from(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

}  // namespace

std::string save_snapshot(const FactStore& store) {
    json doc;
    doc["format"] = "versa-snapshot";
    doc["version"] = kSnapshotVersion;
    doc["threshold"] = store.cached_threshold() ? json(*store.cached_threshold()) : json(nullptr);
    doc["functors"] = json::array();
    for (auto r : store.cached_functors()) doc["functors"].push_back(std::string(to_string(r)));
    doc["low"] = store.lowest_frame() ? json(*store.lowest_frame()) : json(nullptr);
    doc["high_water"] = store.high_water() ? json(*store.high_water()) : json(nullptr);

    doc["statics"] = json::array();
    for (const auto& [id, s] : store.statics()) {
        doc["statics"].push_back({{"id", id.str()}, {"bounds", rect_json(s.bounds)}, {"orient", s.orient}});
    }

    doc["frames"] = json::array();
    for (FrameNum f : store.populated_frames()) {
        json frame{{"frame", f}};
        frame["entities"] = json::array();
        for (const auto& e : store.frame_entities(f)) {
            frame["entities"].push_back({{"id", e.id.str()},
                                         {"type", std::string(to_string(e.type))},
                                         {"bounds", rect_json(e.bounds)},
                                         {"orient", e.orient}});
        }
        json cached = json::object();
        for (auto r : kAllSpatialRelations) {
            auto pairs = store.cached_pairs(r, f);
            if (pairs.empty()) continue;
            json list = json::array();
            for (const auto& [a, b] : pairs) list.push_back({a.str(), b.str()});
            cached[std::string(to_string(r))] = std::move(list);
        }
        frame["cached"] = std::move(cached);
        doc["frames"].push_back(std::move(frame));
    }
    return doc.dump(1) + "\n";
}

FactStore load_snapshot(std::string_view text) {
    try {
        const json doc = json::parse(text);
        if (doc.value("format", "") != "versa-snapshot") throw Error(ErrorCode::parse_error, "not a store snapshot");
        if (doc.at("version").get<int>() != kSnapshotVersion) {
            throw Error(ErrorCode::parse_error, "unsupported snapshot version");
        }
        FactStore store;
        for (const auto& s : doc.at("statics")) {
            store.assert_static_entity(EntityId(s.at("id").get<std::string>()),
                                       geometry::box_from_rect(rect_from(s.at("bounds"))), s.at("orient").get<double>());
        }
        if (!doc.at("threshold").is_null()) {
            std::vector<SpatialRelation> functors;
            for (const auto& n : doc.at("functors")) functors.push_back(parse_relation_ref(n.get<std::string>()).relation);
            store.begin_entailment(functors, SpatialConfig{doc.at("threshold").get<double>()});
        }
        for (const auto& fr : doc.at("frames")) {
            const auto f = fr.at("frame").get<FrameNum>();
            for (const auto& e : fr.at("entities")) {
                const auto bounds = rect_from(e.at("bounds"));
                store.assert_entity_facts({EntityId(e.at("id").get<std::string>()), f,
                                           parse_entity_type(e.at("type").get<std::string>()), bounds,
                                           bounds.center(), e.at("orient").get<double>()});
            }
            for (const auto& [name, pairs] : fr.at("cached").items()) {
                const auto r = parse_relation_ref(name).relation;
                for (const auto& p : pairs) {
                    store.add_relation_fact(
                        {r, EntityId(p.at(0).get<std::string>()), EntityId(p.at(1).get<std::string>()), f});
                }
            }
        }
        auto opt = [](const json& j) { return j.is_null() ? std::optional<FrameNum>{} : j.get<FrameNum>(); };
        store.restore_progress(opt(doc.at("low")), opt(doc.at("high_water")));
        return store;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("bad snapshot: ") + e.what());
    }
}

void write_snapshot(const FactStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << save_snapshot(store);
    if (!out) throw Error(ErrorCode::io_error, "write to " + path.string() + " failed");
}

FactStore read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_snapshot(buf.str());
}

}  // namespace versa
