#include "versa/relations.hpp"

#include "versa/error.hpp"

#include <cctype>
#include <cmath>

namespace versa {

namespace {

struct Named {
    std::string_view name;
    std::string_view snake;
    SpatialRelation relation;
};

constexpr Named kNames[] = {
    {"near", "near", SpatialRelation::near},
    {"overlapping", "overlapping", SpatialRelation::overlapping},
    {"inside", "inside", SpatialRelation::inside},
    {"outside", "outside", SpatialRelation::outside},
    {"higher", "higher", SpatialRelation::higher},
    {"lower", "lower", SpatialRelation::lower},
    {"above", "above", SpatialRelation::above},
    {"below", "below", SpatialRelation::below},
    {"moreLeft", "more_left", SpatialRelation::more_left},
    {"moreRight", "more_right", SpatialRelation::more_right},
    {"leftOf", "left_of", SpatialRelation::left_of},
    {"rightOf", "right_of", SpatialRelation::right_of},
};

}  // namespace

void validate(const SpatialConfig& cfg) {
    if (!std::isfinite(cfg.near_threshold) || cfg.near_threshold <= 0.0) {
        throw Error(ErrorCode::invalid_argument, "near threshold must be a positive number");
    }
}

std::string_view to_string(SpatialRelation r) {
    for (const auto& n : kNames) {
        if (n.relation == r) return n.name;
    }
    return "unknown";
}

std::optional<SpatialRelation> try_parse_spatial_relation(std::string_view name) {
    for (const auto& n : kNames) {
        if (n.name == name || n.snake == name) return n.relation;
    }
    return std::nullopt;
}

RelationRef parse_relation_ref(std::string_view name) {
    const std::string original(name);
    RelationRef ref;
    if (name.starts_with("not_")) {
        ref.negated = true;
        name.remove_prefix(4);
    }
    if (name.ends_with("_kb")) name.remove_suffix(3);
    auto r = try_parse_spatial_relation(name);
    if (!r) throw Error(ErrorCode::unknown_relation, "unknown spatial relation '" + original + "'");
    ref.relation = *r;
    return ref;
}

std::string format(const RelationRef& ref, bool kb_suffix) {
    std::string out = ref.negated ? "not_" : "";
    out += to_string(ref.relation);
    if (kb_suffix) out += "_kb";
    return out;
}

std::optional<SpatialRelation> swapped_equivalent(SpatialRelation r) {
    switch (r) {
        case SpatialRelation::higher: return SpatialRelation::lower;
        case SpatialRelation::lower: return SpatialRelation::higher;
        case SpatialRelation::above: return SpatialRelation::below;
        case SpatialRelation::below: return SpatialRelation::above;
        case SpatialRelation::more_left: return SpatialRelation::more_right;
        case SpatialRelation::more_right: return SpatialRelation::more_left;
        case SpatialRelation::left_of: return SpatialRelation::right_of;
        case SpatialRelation::right_of: return SpatialRelation::left_of;
        case SpatialRelation::near:
        case SpatialRelation::overlapping:
        case SpatialRelation::outside:
            return r;
        case SpatialRelation::inside: return std::nullopt;
    }
    return std::nullopt;
}

bool is_symmetric(SpatialRelation r) {
    return r == SpatialRelation::near || r == SpatialRelation::overlapping || r == SpatialRelation::outside;
}

bool relation_holds(SpatialRelation r, const geometry::Rect& a, const geometry::Rect& b,
                    const SpatialConfig& cfg) {
    using namespace geometry;
    switch (r) {
        case SpatialRelation::near: return dist(a.center(), b.center()) < cfg.near_threshold;
        case SpatialRelation::overlapping: return overlaps(a, b);
        case SpatialRelation::inside: return rect_inside(a, b);
        case SpatialRelation::outside: return !overlaps(a, b);
        case SpatialRelation::higher: return rect_higher(a, b);
        case SpatialRelation::lower: return rect_lower(a, b);
        case SpatialRelation::above: return rect_higher(a, b) && in_x_range(a, b);
        case SpatialRelation::below: return rect_lower(a, b) && in_x_range(a, b);
        case SpatialRelation::more_left: return rect_left(a, b);
        case SpatialRelation::more_right: return rect_right(a, b);
        case SpatialRelation::left_of: return rect_left(a, b) && in_y_range(a, b);
        case SpatialRelation::right_of: return rect_right(a, b) && in_y_range(a, b);
    }
    return false;
}

}  // namespace versa
