#pragma once

#include "versa/events.hpp"
#include "versa/templates.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace versa {

inline constexpr int kTemplateFormatVersion = 1;

/// A frame template together with the score threshold it is matched at.
struct FrameTemplateDoc {
    FrameTemplate tmpl;
    double threshold = 1.0;
};

struct EventTemplateDoc {
    EventTemplate event;
    SearchMode mode = SearchMode::all;
};

/// Frame template documents look like
///   {"version": 1, "id": "f1", "type_list": ["object:O1", "person:P1"],
///    "relations": ["near_kb(O1,P1)"], "not_exists": [], "threshold": 1.0}
nlohmann::json to_json(const FrameTemplate& tmpl, double threshold = 1.0);
FrameTemplateDoc frame_template_from_json(const nlohmann::json& doc);
FrameTemplateDoc load_frame_template(const std::filesystem::path& path);

/// Event documents list steps and constraints:
///   {"version": 1, "id": "e", "steps": [{"id": "anchor", "mode": "instant",
///    "threshold": 1.0, "template": {...} | "file.json"}],
///    "constraints": ["before(prior,anchor)"], "options": {"mode": "all"}}
/// String step templates are paths relative to `base_dir`.
nlohmann::json to_json(const EventTemplate& event, SearchMode mode = SearchMode::all);
EventTemplateDoc event_template_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
EventTemplateDoc load_event_template(const std::filesystem::path& path);

/// `frametemplate(f1, [object:O1, person:P1], [near_kb(O1,P1)], [])`
std::string format(const FrameTemplate& tmpl);

TypedTerm parse_typed_term(std::string_view text);
TemplateRelation parse_template_relation(std::string_view text);
std::string format(const TypedTerm& term);
std::string format(const TemplateRelation& relation);

nlohmann::json to_json(const Detection& detection);
Detection detection_from_json(const nlohmann::json& doc);

}  // namespace versa
