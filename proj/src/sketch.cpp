#include "versa/sketch.hpp"

#include "versa/error.hpp"
#include "versa/kb.hpp"
#include "versa/spatial.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace versa {

std::string sketch_variable(const std::string& id, EntityType type) {
    if (type == EntityType::static_region) return id;
    if (!id.empty() && (std::isalpha(static_cast<unsigned char>(id.front())) || id.front() == '_')) {
        std::string v = id;
        v.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(v.front())));
        return v;
    }
    return (type == EntityType::person ? "P" : "O") + id;
}

FrameTemplate sketch_to_frame_template(const Sketch& sketch, const SpatialConfig& cfg,
                                       std::span<const SpatialRelation> functors) {
    validate(cfg);
    std::set<std::string> drawn;
    std::set<std::string> names;
    for (const auto& e : sketch.entities) {
        if (e.id.empty()) throw Error(ErrorCode::invalid_argument, "sketch entity with empty id");
        if (e.type == EntityType::static_region && Term{e.id}.is_variable()) {
            throw Error(ErrorCode::invalid_argument, "static id " + e.id + " would read as a variable");
        }
        if (!drawn.insert(e.id).second) throw Error(ErrorCode::duplicate, "sketch entity " + e.id + " drawn twice");
        if (!names.insert(sketch_variable(e.id, e.type)).second) {
            throw Error(ErrorCode::duplicate, "sketch entities collide on name " + sketch_variable(e.id, e.type));
        }
    }
    std::set<std::string> absent;
    for (const auto& [id, type] : sketch.not_exists) {
        if (drawn.contains(id)) {
            throw Error(ErrorCode::invalid_argument, "entity " + id + " is both drawn and marked not-exists");
        }
        if (!absent.insert(id).second) throw Error(ErrorCode::duplicate, "not-exists entity " + id + " listed twice");
    }

    constexpr FrameNum kFrame = 0;
    FactStore scratch;
    for (const auto& e : sketch.entities) {
        if (e.type == EntityType::static_region) {
            scratch.assert_static_entity(EntityId(e.id), e.box, e.orient);
        } else {
            const auto rect = geometry::rect_from_box(e.box);
            scratch.assert_entity_facts({EntityId(e.id), kFrame, e.type, rect, e.box.center, e.orient});
        }
    }
    spatial::entail_frame(scratch, kFrame, functors, cfg);
    scratch.set_high_water(kFrame);

    std::vector<const SketchEntity*> order;
    for (const auto& e : sketch.entities) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const SketchEntity* a, const SketchEntity* b) {
        const auto ta = to_string(a->type);
        const auto tb = to_string(b->type);
        if (ta != tb) return ta < tb;
        return EntityId(a->id) < EntityId(b->id);
    });

    FrameTemplate tmpl;
    tmpl.id = sketch.id;
    for (const auto* e : order) tmpl.type_list.push_back({e->type, Term{sketch_variable(e->id, e->type)}});

    for (auto r : functors) {
        const RelationRef ref{r, false};
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = 0; j < order.size(); ++j) {
                if (i == j || (is_symmetric(r) && j < i)) continue;
                const auto* a = order[i];
                const auto* b = order[j];
                if (a->type == EntityType::static_region && b->type == EntityType::static_region) continue;
                if (scratch.cached_holds(ref, EntityId(a->id), EntityId(b->id), kFrame, &cfg)) {
                    tmpl.relations.push_back(
                        {ref, Term{sketch_variable(a->id, a->type)}, Term{sketch_variable(b->id, b->type)}});
                }
            }
        }
    }
    for (const auto& [id, type] : sketch.not_exists) tmpl.not_exists.push_back(Term{sketch_variable(id, type)});
    tmpl.validate();
    return tmpl;
}

}  // namespace versa
