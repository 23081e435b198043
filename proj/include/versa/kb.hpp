#pragma once

#include "versa/entity.hpp"
#include "versa/geometry.hpp"
#include "versa/relations.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace versa {

/// The five basic facts of one entity in one frame. `exists` is implied by
/// the presence of the record.
struct EntityFrameFacts {
    EntityId entity;
    FrameNum frame = 0;
    EntityType type = EntityType::object;
    geometry::Rect bounds;
    geometry::Point loc;
    /// Degrees clockwise from straight up; 0 when not applicable.
    double orient = 0.0;
};

/// A scene region present in every frame.
struct StaticEntity {
    EntityId id;
    geometry::Rect bounds;
    geometry::Point loc;
    double orient = 0.0;
};

/// Uniform read view over dynamic and static entities.
struct EntityView {
    EntityId id;
    EntityType type = EntityType::object;
    geometry::Rect bounds;
    geometry::Point loc;
    double orient = 0.0;
};

enum class BasicKind { exists, type, bounds, loc, orient };

struct BasicFact {
    BasicKind kind = BasicKind::exists;
    FrameNum frame = 0;
    EntityView entity;
};

struct RelationFact {
    SpatialRelation relation = SpatialRelation::near;
    EntityId e1;
    EntityId e2;
    FrameNum frame = 0;

    friend bool operator==(const RelationFact&, const RelationFact&) = default;
};

using EntityPair = std::pair<EntityId, EntityId>;

/// The knowledge base: per-frame basic facts, static entities and the cache
/// of entailed spatial relations.
///
/// Copies are cheap: frame records are shared between copies and cloned on
/// the first write (see StoreHandle). Cached relation facts and published
/// snapshots never extend past the high-water mark.
class FactStore {
public:
    // -- basic facts ------------------------------------------------------
    /// Throws on duplicate (entity, frame), on a loc that is not the bounds
    /// center, on static ids, and on frames at or below the high-water mark.
    void assert_entity_facts(const EntityFrameFacts& facts);
    /// Registers a static region. Relations between it and the entities of
    /// already-processed frames are entailed into the cache immediately.
    void assert_static_entity(const EntityId& id, const geometry::BoxSpec& box, double orient);

    bool exists(const EntityId& id, FrameNum frame) const;
    bool is_static(const EntityId& id) const { return statics_.contains(id); }
    std::optional<EntityView> entity(const EntityId& id, FrameNum frame) const;
    /// Dynamic entities of the frame, ascending by id. Statics excluded.
    std::vector<EntityId> entities_in_frame(FrameNum frame) const;
    std::vector<EntityView> frame_entities(FrameNum frame) const;
    /// Dynamic entities followed by every static entity.
    std::vector<EntityView> participants(FrameNum frame) const;
    const std::map<EntityId, StaticEntity>& statics() const noexcept { return statics_; }

    /// Wildcards are empty optionals. With a wildcard frame, frames are
    /// yielded in ascending order; static entities answer every processed
    /// frame.
    std::vector<BasicFact> query_basic(BasicKind kind, const std::optional<EntityId>& entity,
                                       const std::optional<FrameNum>& frame) const;

    // -- cached relations -------------------------------------------------
    /// Records the functor set and near threshold the cache is built with.
    /// A later call with different settings throws stale_cache.
    void begin_entailment(std::span<const SpatialRelation> functors, const SpatialConfig& cfg);
    void add_relation_fact(const RelationFact& fact);
    bool has_cached(SpatialRelation relation, const EntityId& e1, const EntityId& e2, FrameNum frame) const;
    std::vector<EntityPair> cached_pairs(SpatialRelation relation, FrameNum frame) const;

    /// Answers a relation from the cache. Functors outside the cached set
    /// are derived by argument swap or (for outside and every `not_` form)
    /// by negation among entities that exist in the frame. When `cfg` is
    /// given and a near-based query disagrees with the recorded threshold,
    /// throws stale_cache. Frames above the high-water mark throw
    /// not_processed.
    bool cached_holds(const RelationRef& ref, const EntityId& e1, const EntityId& e2, FrameNum frame,
                      const SpatialConfig* cfg = nullptr) const;
    std::vector<RelationFact> query_cached(const RelationRef& ref, const std::optional<EntityId>& e1,
                                           const std::optional<EntityId>& e2,
                                           const std::optional<FrameNum>& frame,
                                           const SpatialConfig* cfg = nullptr) const;

    std::optional<double> cached_threshold() const noexcept { return threshold_; }
    const std::vector<SpatialRelation>& cached_functors() const noexcept { return functors_; }
    bool can_answer_from_cache(SpatialRelation relation) const;

    // -- progress ---------------------------------------------------------
    /// Monotone; throws on regression.
    void set_high_water(FrameNum frame);
    std::optional<FrameNum> high_water() const noexcept { return high_water_; }
    /// (lowest, highest) processed frame.
    std::optional<std::pair<FrameNum, FrameNum>> frame_range() const;
    bool is_processed(FrameNum frame) const;
    /// Throws not_processed when the frame is above the high-water mark.
    void require_processed(FrameNum frame) const;

    std::size_t basic_fact_count() const;
    std::size_t cached_fact_count() const;
    /// Frames that hold at least one dynamic entity, ascending.
    std::vector<FrameNum> populated_frames() const;

    /// Low-level access used by snapshot serialization.
    void restore_progress(std::optional<FrameNum> low, std::optional<FrameNum> high_water);
    std::optional<FrameNum> lowest_frame() const noexcept { return low_frame_; }

private:
    struct FrameData {
        std::map<EntityId, EntityFrameFacts> entities;
        std::array<std::set<EntityPair>, kSpatialRelationCount> cached;
    };

    const FrameData* find_frame(FrameNum frame) const;
    FrameData& writable_frame(FrameNum frame);
    bool positive_cached(SpatialRelation relation, const EntityId& e1, const EntityId& e2, FrameNum frame) const;
    void check_threshold(SpatialRelation relation, const SpatialConfig* cfg) const;
    void note_frame(FrameNum frame);

    std::map<FrameNum, std::shared_ptr<FrameData>> frames_;
    std::map<EntityId, StaticEntity> statics_;
    std::vector<SpatialRelation> functors_;
    std::optional<double> threshold_;
    std::optional<FrameNum> high_water_;
    std::optional<FrameNum> low_frame_;
};

/// Single-writer / multi-reader access to a FactStore. Writers are
/// serialized; readers take immutable snapshots that never block each other
/// and only change when a writer publishes.
class StoreHandle {
public:
    StoreHandle() : StoreHandle(FactStore{}) {}
    explicit StoreHandle(FactStore initial);

    std::shared_ptr<const FactStore> snapshot() const;

    /// Runs `fn` on the writer's working copy, then publishes it.
    template <typename Fn>
    decltype(auto) write(Fn&& fn) {
        std::lock_guard writer(write_mutex_);
        struct Publisher {
            StoreHandle* self;
            ~Publisher() { self->publish(); }
        } publisher{this};
        return fn(working_);
    }

private:
    void publish();

    std::mutex write_mutex_;
    mutable std::mutex snapshot_mutex_;
    FactStore working_;
    std::shared_ptr<const FactStore> published_;
};

}  // namespace versa
