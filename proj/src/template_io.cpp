#include "versa/template_io.hpp"

#include "versa/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace versa {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

void check_version(const json& doc, const char* what) {
    if (!doc.is_object()) throw Error(ErrorCode::template_error, std::string(what) + " must be an object");
    const int v = doc.value("version", kTemplateFormatVersion);
    if (v != kTemplateFormatVersion) {
        throw Error(ErrorCode::template_error,
                    std::string("unsupported ") + what + " version " + std::to_string(v));
    }
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
    }
}

template <typename T>
T field(const json& doc, const char* key, const char* what) {
    if (!doc.contains(key)) throw Error(ErrorCode::template_error, std::string(what) + " lacks '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::template_error, std::string(what) + ": '" + key + "' has the wrong type");
    }
}

}  // namespace

TypedTerm parse_typed_term(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::template_error, "type list entry must be type:Name, got '" + std::string(text) + "'");
    }
    TypedTerm t;
    try {
        t.type = parse_entity_type(trim(text.substr(0, colon)));
    } catch (const Error& e) {
        throw Error(ErrorCode::template_error, e.what());
    }
    t.term.text = std::string(trim(text.substr(colon + 1)));
    if (t.term.text.empty()) throw Error(ErrorCode::template_error, "empty name in '" + std::string(text) + "'");
    return t;
}

TemplateRelation parse_template_relation(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    const auto comma = text.find(',', open == std::string_view::npos ? 0 : open);
    if (open == std::string_view::npos || comma == std::string_view::npos || !text.ends_with(")")) {
        throw Error(ErrorCode::template_error, "relation must look like rel(A,B), got '" + std::string(text) + "'");
    }
    TemplateRelation r;
    try {
        r.relation = parse_relation_ref(trim(text.substr(0, open)));
    } catch (const Error& e) {
        throw Error(ErrorCode::template_error, e.what());
    }
    r.first.text = std::string(trim(text.substr(open + 1, comma - open - 1)));
    r.second.text = std::string(trim(text.substr(comma + 1, text.size() - comma - 2)));
    if (r.first.text.empty() || r.second.text.empty()) {
        throw Error(ErrorCode::template_error, "missing argument in '" + std::string(text) + "'");
    }
    return r;
}

std::string format(const TypedTerm& t) { return std::string(to_string(t.type)) + ":" + t.term.text; }

std::string format(const TemplateRelation& r) {
    return format(r.relation, true) + "(" + r.first.text + "," + r.second.text + ")";
}

std::string format(const FrameTemplate& tmpl) {
    auto list = [](const auto& items, auto&& render) {
        std::string out = "[";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += ", ";
            out += render(items[i]);
        }
        return out + "]";
    };
    return "frametemplate(" + tmpl.id + ", " +
           list(tmpl.type_list, [](const TypedTerm& t) { return format(t); }) + ", " +
           list(tmpl.relations, [](const TemplateRelation& r) { return format(r); }) + ", " +
           list(tmpl.not_exists, [](const Term& t) { return t.text; }) + ")";
}

json to_json(const FrameTemplate& tmpl, double threshold) {
    json doc{{"version", kTemplateFormatVersion}, {"id", tmpl.id}};
    doc["type_list"] = json::array();
    for (const auto& t : tmpl.type_list) doc["type_list"].push_back(format(t));
    doc["relations"] = json::array();
    for (const auto& r : tmpl.relations) doc["relations"].push_back(format(r));
    doc["not_exists"] = json::array();
    for (const auto& n : tmpl.not_exists) doc["not_exists"].push_back(n.text);
    doc["threshold"] = threshold;
    return doc;
}

FrameTemplateDoc frame_template_from_json(const json& doc) {
    check_version(doc, "frame template");
    FrameTemplateDoc out;
    out.tmpl.id = field<std::string>(doc, "id", "frame template");
    for (const auto& s : field<std::vector<std::string>>(doc, "type_list", "frame template")) {
        out.tmpl.type_list.push_back(parse_typed_term(s));
    }
    if (doc.contains("relations")) {
        for (const auto& s : field<std::vector<std::string>>(doc, "relations", "frame template")) {
            out.tmpl.relations.push_back(parse_template_relation(s));
        }
    }
    if (doc.contains("not_exists")) {
        for (const auto& s : field<std::vector<std::string>>(doc, "not_exists", "frame template")) {
            out.tmpl.not_exists.push_back(Term{std::string(trim(s))});
        }
    }
    if (doc.contains("threshold")) out.threshold = field<double>(doc, "threshold", "frame template");
    if (!(out.threshold >= 0.0 && out.threshold <= 1.0)) {
        throw Error(ErrorCode::template_error, "threshold must lie in [0, 1]");
    }
    out.tmpl.validate();
    return out;
}

FrameTemplateDoc load_frame_template(const std::filesystem::path& path) {
    return frame_template_from_json(read_json(path));
}

json to_json(const EventTemplate& event, SearchMode mode) {
    json doc{{"version", kTemplateFormatVersion}, {"id", event.id}};
    doc["steps"] = json::array();
    for (const auto& s : event.steps) {
        doc["steps"].push_back({{"id", s.id},
                                {"mode", std::string(to_string(s.mode))},
                                {"threshold", s.threshold},
                                {"template", to_json(s.frame_template, s.threshold)}});
    }
    doc["constraints"] = json::array();
    for (const auto& c : event.constraints) doc["constraints"].push_back(c.relation + "(" + c.first + "," + c.second + ")");
    doc["options"] = {{"mode", mode == SearchMode::first ? "first" : "all"}};
    return doc;
}

EventTemplateDoc event_template_from_json(const json& doc, const std::filesystem::path& base_dir) {
    check_version(doc, "event template");
    EventTemplateDoc out;
    out.event.id = field<std::string>(doc, "id", "event template");
    if (!doc.contains("steps") || !doc.at("steps").is_array()) {
        throw Error(ErrorCode::template_error, "event template lacks a 'steps' list");
    }
    for (const auto& s : doc.at("steps")) {
        if (!s.is_object()) throw Error(ErrorCode::template_error, "event step must be an object");
        EventStep step;
        step.id = field<std::string>(s, "id", "event step");
        if (!s.contains("template")) throw Error(ErrorCode::template_error, "step " + step.id + " lacks 'template'");
        const auto& t = s.at("template");
        FrameTemplateDoc ft = t.is_string() ? load_frame_template(base_dir / t.get<std::string>())
                                            : frame_template_from_json(t);
        step.frame_template = std::move(ft.tmpl);
        step.threshold = s.contains("threshold") ? field<double>(s, "threshold", "event step") : ft.threshold;
        if (s.contains("mode")) step.mode = parse_step_mode(field<std::string>(s, "mode", "event step"));
        out.event.steps.push_back(std::move(step));
    }
    if (doc.contains("constraints")) {
        for (const auto& c : doc.at("constraints")) {
            if (c.is_string()) {
                out.event.constraints.push_back(parse_constraint(c.get<std::string>()));
            } else {
                out.event.constraints.push_back({field<std::string>(c, "relation", "constraint"),
                                                 field<std::string>(c, "first", "constraint"),
                                                 field<std::string>(c, "second", "constraint")});
            }
        }
    }
    if (doc.contains("options") && doc.at("options").contains("mode")) {
        const auto m = field<std::string>(doc.at("options"), "mode", "options");
        if (m == "first") out.mode = SearchMode::first;
        else if (m == "all") out.mode = SearchMode::all;
        else throw Error(ErrorCode::template_error, "search mode must be 'first' or 'all'");
    }
    out.event.validate();
    return out;
}

EventTemplateDoc load_event_template(const std::filesystem::path& path) {
    return event_template_from_json(read_json(path), path.parent_path());
}

json to_json(const Detection& d) {
    json doc{{"event", d.event}, {"detected_at", d.detected_at}};
    doc["bindings"] = json::object();
    for (const auto& [var, id] : d.bindings) doc["bindings"][var] = id.str();
    doc["steps"] = json::array();
    for (const auto& s : d.steps) {
        doc["steps"].push_back({{"step", s.step}, {"begin", s.when.begin}, {"end", s.when.end}});
    }
    return doc;
}

Detection detection_from_json(const json& doc) {
    try {
        Detection d;
        d.event = doc.at("event").get<std::string>();
        d.detected_at = doc.at("detected_at").get<FrameNum>();
        for (const auto& [var, id] : doc.at("bindings").items()) d.bindings.emplace(var, EntityId(id.get<std::string>()));
        for (const auto& s : doc.at("steps")) {
            d.steps.push_back({s.at("step").get<std::string>(),
                               TimeRef{s.at("begin").get<FrameNum>(), s.at("end").get<FrameNum>()}});
        }
        return d;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("bad detection record: ") + e.what());
    }
}

}  // namespace versa
