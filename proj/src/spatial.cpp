#include "versa/spatial.hpp"

#include "versa/error.hpp"

namespace versa::spatial {

namespace {

EntityView require_entity(const FactStore& store, const EntityId& id, FrameNum frame) {
    auto v = store.entity(id, frame);
    if (!v) {
        throw Error(ErrorCode::unknown_entity,
                    "entity " + id.str() + " does not exist in frame " + std::to_string(frame));
    }
    return *v;
}

}  // namespace

double entity_dist(const FactStore& store, const EntityId& e1, const EntityId& e2, FrameNum frame) {
    const auto a = require_entity(store, e1, frame);
    const auto b = require_entity(store, e2, frame);
    return geometry::dist(a.loc, b.loc);
}

bool eval_relation(const FactStore& store, SpatialRelation relation, const EntityId& e1, const EntityId& e2,
                   FrameNum frame, const SpatialConfig& cfg) {
    const auto a = require_entity(store, e1, frame);
    const auto b = require_entity(store, e2, frame);
    if (e1 == e2) {
        throw Error(ErrorCode::invalid_argument, "spatial relations need two distinct entities");
    }
    return relation_holds(relation, a.bounds, b.bounds, cfg);
}

bool eval_relation(const FactStore& store, const RelationRef& ref, const EntityId& e1, const EntityId& e2,
                   FrameNum frame, const SpatialConfig& cfg) {
    if (e1 == e2) return false;
    const auto a = store.entity(e1, frame);
    const auto b = store.entity(e2, frame);
    if (!a || !b) return false;
    return relation_holds(ref.relation, a->bounds, b->bounds, cfg) != ref.negated;
}

bool relation_query(const FactStore& store, const RelationRef& ref, const EntityId& e1, const EntityId& e2,
                    FrameNum frame, RelationSource source, const SpatialConfig& cfg) {
    if (source == RelationSource::cached) return store.cached_holds(ref, e1, e2, frame, &cfg);
    return eval_relation(store, ref, e1, e2, frame, cfg);
}

std::vector<RelationFact> entail_frame(FactStore& store, FrameNum frame, std::span<const SpatialRelation> functors,
                                       const SpatialConfig& cfg) {
    store.begin_entailment(functors, cfg);
    const auto entities = store.participants(frame);
    std::vector<RelationFact> facts;
    for (SpatialRelation r : functors) {
        for (const auto& a : entities) {
            for (const auto& b : entities) {
                if (a.id == b.id) continue;
                if (a.type == EntityType::static_region && b.type == EntityType::static_region) continue;
                if (relation_holds(r, a.bounds, b.bounds, cfg)) facts.push_back({r, a.id, b.id, frame});
            }
        }
    }
    for (const auto& f : facts) store.add_relation_fact(f);
    return facts;
}

}  // namespace versa::spatial
