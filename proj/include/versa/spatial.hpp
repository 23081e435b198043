#pragma once

#include "versa/kb.hpp"
#include "versa/relations.hpp"

#include <span>
#include <vector>

namespace versa::spatial {

/// Center-to-center distance. Throws unknown_entity when either entity is
/// absent from the frame.
double entity_dist(const FactStore& store, const EntityId& e1, const EntityId& e2, FrameNum frame);

/// Evaluates a positive relation from basic facts. Requires both entities in
/// the frame and e1 != e2.
bool eval_relation(const FactStore& store, SpatialRelation relation, const EntityId& e1, const EntityId& e2,
                   FrameNum frame, const SpatialConfig& cfg);

/// Closed-world evaluation from basic facts: false when either entity is
/// absent; `not_` forms hold when both exist and the positive form fails.
bool eval_relation(const FactStore& store, const RelationRef& ref, const EntityId& e1, const EntityId& e2,
                   FrameNum frame, const SpatialConfig& cfg);

/// Where relation answers come from during matching.
enum class RelationSource { cached, entailed };

/// Dispatches to the cache or to evaluation from basic facts.
bool relation_query(const FactStore& store, const RelationRef& ref, const EntityId& e1, const EntityId& e2,
                    FrameNum frame, RelationSource source, const SpatialConfig& cfg);

/// Evaluates every functor on every ordered pair of distinct participants
/// (pairs of two static regions are skipped: they never change)
/// (dynamic entities plus statics) of the frame and caches the facts that
/// hold. Returns the facts in functor, then pair order.
std::vector<RelationFact> entail_frame(FactStore& store, FrameNum frame, std::span<const SpatialRelation> functors,
                                       const SpatialConfig& cfg);

}  // namespace versa::spatial
