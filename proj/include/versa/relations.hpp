#pragma once

#include "versa/geometry.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace versa {

enum class SpatialRelation {
    near,
    overlapping,
    inside,
    outside,
    higher,
    lower,
    above,
    below,
    more_left,
    more_right,
    left_of,
    right_of,
};

inline constexpr std::size_t kSpatialRelationCount = 12;

inline constexpr std::array<SpatialRelation, kSpatialRelationCount> kAllSpatialRelations = {
    SpatialRelation::near,      SpatialRelation::overlapping, SpatialRelation::inside,
    SpatialRelation::outside,   SpatialRelation::higher,      SpatialRelation::lower,
    SpatialRelation::above,     SpatialRelation::below,       SpatialRelation::more_left,
    SpatialRelation::more_right, SpatialRelation::left_of,    SpatialRelation::right_of,
};

/// Functors entailed and cached per frame by default. The rest are answered
/// from these by argument swap (lower, below, moreRight, rightOf) or by
/// negation within the frame (outside).
inline constexpr std::array<SpatialRelation, 7> kDefaultCachedRelations = {
    SpatialRelation::near,      SpatialRelation::overlapping, SpatialRelation::inside,
    SpatialRelation::higher,    SpatialRelation::more_left,   SpatialRelation::above,
    SpatialRelation::left_of,
};

struct SpatialConfig {
    /// Near threshold in pixels; near holds when the center distance is
    /// strictly below it.
    double near_threshold = 50.0;
};

/// Throws versa::Error unless the threshold is finite and positive.
void validate(const SpatialConfig& cfg);

/// A relation reference as written in templates: `near`, `not_near`,
/// optionally with the `_kb` suffix.
struct RelationRef {
    SpatialRelation relation = SpatialRelation::near;
    bool negated = false;

    friend bool operator==(const RelationRef&, const RelationRef&) = default;
};

/// Canonical camel-case name: "near", "moreLeft", "leftOf", ...
std::string_view to_string(SpatialRelation r);
std::optional<SpatialRelation> try_parse_spatial_relation(std::string_view name);
/// Accepts camel-case or snake_case names (`more_left`), an optional `not_`
/// prefix and an optional `_kb` suffix. Throws versa::Error on unknown names.
RelationRef parse_relation_ref(std::string_view name);
/// "near", "not_near"; with `kb_suffix`, "near_kb" / "not_near_kb".
std::string format(const RelationRef& ref, bool kb_suffix = false);

/// Relation answered by swapping arguments, e.g. lower(a,b) = higher(b,a).
std::optional<SpatialRelation> swapped_equivalent(SpatialRelation r);
bool is_symmetric(SpatialRelation r);

/// Evaluates a positive relation between two bounding boxes.
bool relation_holds(SpatialRelation r, const geometry::Rect& a, const geometry::Rect& b,
                    const SpatialConfig& cfg);

}  // namespace versa
