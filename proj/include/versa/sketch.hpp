#pragma once

#include "versa/relations.hpp"
#include "versa/templates.hpp"

#include <string>
#include <vector>

namespace versa {

struct SketchEntity {
    std::string id;
    EntityType type = EntityType::person;
    geometry::BoxSpec box;
    double orient = 0.0;
};

struct Sketch {
    std::string id;
    std::vector<SketchEntity> entities;
    /// Entities dragged to the not-exists area: (id, type).
    std::vector<std::pair<std::string, EntityType>> not_exists;
};

/// Entails the cached relations among the drawn entities and turns the
/// drawing into a frame template. Person and object ids become variables
/// (first letter upper-cased, or prefixed with P/O); static ids stay
/// constants. Symmetric relations are listed once per unordered pair.
FrameTemplate sketch_to_frame_template(const Sketch& sketch, const SpatialConfig& cfg = {},
                                       std::span<const SpatialRelation> functors = kDefaultCachedRelations);

/// The variable name a sketched id turns into.
std::string sketch_variable(const std::string& id, EntityType type);

}  // namespace versa
