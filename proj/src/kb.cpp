#include "versa/kb.hpp"

#include "versa/error.hpp"

#include <algorithm>
#include <cmath>

namespace versa {

namespace {

std::size_t slot(SpatialRelation r) { return static_cast<std::size_t>(r); }

EntityView view_of(const EntityFrameFacts& f) { return {f.entity, f.type, f.bounds, f.loc, f.orient}; }
EntityView view_of(const StaticEntity& s) {
    return {s.id, EntityType::static_region, s.bounds, s.loc, s.orient};
}

bool near_equal(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

std::string frame_label(FrameNum f) { return "frame " + std::to_string(f); }

}  // namespace

// -- basic facts -------------------------------------------------------------

void FactStore::assert_entity_facts(const EntityFrameFacts& facts) {
    if (facts.entity.empty()) throw Error(ErrorCode::invalid_argument, "entity id must not be empty");
    if (facts.type == EntityType::static_region || is_static(facts.entity)) {
        throw Error(ErrorCode::invalid_argument,
                    "entity " + facts.entity.str() + " is static; use assert_static_entity");
    }
    if (high_water_ && facts.frame <= *high_water_) {
        throw Error(ErrorCode::invalid_argument,
                    frame_label(facts.frame) + " is already processed (high-water mark " +
                        std::to_string(*high_water_) + ")");
    }
    geometry::validate(facts.bounds);
    if (!near_equal(facts.bounds.center().x, facts.loc.x) || !near_equal(facts.bounds.center().y, facts.loc.y)) {
        throw Error(ErrorCode::invalid_argument,
                    "loc of entity " + facts.entity.str() + " is not the center of its bounds");
    }
    if (const auto* existing = find_frame(facts.frame); existing && existing->entities.contains(facts.entity)) {
        throw Error(ErrorCode::duplicate,
                    "entity " + facts.entity.str() + " already asserted in " + frame_label(facts.frame));
    }
    writable_frame(facts.frame).entities.emplace(facts.entity, facts);
    note_frame(facts.frame);
}

void FactStore::assert_static_entity(const EntityId& id, const geometry::BoxSpec& box, double orient) {
    if (id.empty()) throw Error(ErrorCode::invalid_argument, "static entity id must not be empty");
    if (!std::isfinite(orient)) throw Error(ErrorCode::invalid_argument, "static orientation must be finite");
    if (statics_.contains(id)) throw Error(ErrorCode::duplicate, "static entity " + id.str() + " already defined");
    for (const auto& [f, data] : frames_) {
        if (data->entities.contains(id)) {
            throw Error(ErrorCode::duplicate, "id " + id.str() + " is already used by a dynamic entity");
        }
    }
    StaticEntity s{id, geometry::rect_from_box(box), box.center, orient};
    geometry::validate(s.bounds);
    statics_.emplace(id, s);

    // Keep the cache complete for frames that were entailed before this
    // region existed.
    if (!threshold_ || !high_water_ || !low_frame_) return;
    const SpatialConfig cfg{*threshold_};
    for (FrameNum f = *low_frame_; f <= *high_water_; ++f) {
        for (const auto& other : frame_entities(f)) {
            for (SpatialRelation r : functors_) {
                if (relation_holds(r, s.bounds, other.bounds, cfg)) add_relation_fact({r, id, other.id, f});
                if (relation_holds(r, other.bounds, s.bounds, cfg)) add_relation_fact({r, other.id, id, f});
            }
        }
    }
}

bool FactStore::exists(const EntityId& id, FrameNum frame) const { return entity(id, frame).has_value(); }

std::optional<EntityView> FactStore::entity(const EntityId& id, FrameNum frame) const {
    if (auto it = statics_.find(id); it != statics_.end()) return view_of(it->second);
    if (const auto* data = find_frame(frame)) {
        if (auto it = data->entities.find(id); it != data->entities.end()) return view_of(it->second);
    }
    return std::nullopt;
}

std::vector<EntityId> FactStore::entities_in_frame(FrameNum frame) const {
    std::vector<EntityId> ids;
    if (const auto* data = find_frame(frame)) {
        for (const auto& [id, _] : data->entities) ids.push_back(id);
    }
    return ids;
}

std::vector<EntityView> FactStore::frame_entities(FrameNum frame) const {
    std::vector<EntityView> out;
    if (const auto* data = find_frame(frame)) {
        for (const auto& [_, f] : data->entities) out.push_back(view_of(f));
    }
    return out;
}

std::vector<EntityView> FactStore::participants(FrameNum frame) const {
    auto out = frame_entities(frame);
    for (const auto& [_, s] : statics_) out.push_back(view_of(s));
    return out;
}

std::vector<BasicFact> FactStore::query_basic(BasicKind kind, const std::optional<EntityId>& entity_id,
                                              const std::optional<FrameNum>& frame) const {
    std::vector<BasicFact> out;
    auto emit_frame = [&](FrameNum f) {
        if (entity_id) {
            if (auto v = entity(*entity_id, f)) out.push_back({kind, f, *v});
            return;
        }
        for (auto& v : participants(f)) out.push_back({kind, f, std::move(v)});
    };
    if (frame) {
        emit_frame(*frame);
        return out;
    }
    const bool static_target = entity_id && is_static(*entity_id);
    if ((static_target || (!entity_id && !statics_.empty())) && low_frame_ && high_water_) {
        // Statics exist everywhere, so walk the whole processed range.
        for (FrameNum f = *low_frame_; f <= *high_water_; ++f) emit_frame(f);
        return out;
    }
    for (const auto& [f, _] : frames_) {
        if (high_water_ && f > *high_water_) break;
        emit_frame(f);
    }
    return out;
}

// -- cached relations -----------------------------------------------------------

void FactStore::begin_entailment(std::span<const SpatialRelation> functors, const SpatialConfig& cfg) {
    validate(cfg);
    std::vector<SpatialRelation> requested(functors.begin(), functors.end());
    std::sort(requested.begin(), requested.end());
    requested.erase(std::unique(requested.begin(), requested.end()), requested.end());
    if (threshold_) {
        if (*threshold_ != cfg.near_threshold) {
            throw Error(ErrorCode::stale_cache, "cache was built with near threshold " +
                                                    std::to_string(*threshold_) + ", not " +
                                                    std::to_string(cfg.near_threshold));
        }
        if (requested != functors_) {
            throw Error(ErrorCode::stale_cache, "cache was built with a different functor set");
        }
        return;
    }
    threshold_ = cfg.near_threshold;
    functors_ = std::move(requested);
}

void FactStore::add_relation_fact(const RelationFact& fact) {
    if (fact.e1 == fact.e2) return;  // reflexive pairs are never cached
    writable_frame(fact.frame).cached[slot(fact.relation)].emplace(fact.e1, fact.e2);
}

bool FactStore::has_cached(SpatialRelation relation, const EntityId& e1, const EntityId& e2, FrameNum frame) const {
    const auto* data = find_frame(frame);
    return data && data->cached[slot(relation)].contains({e1, e2});
}

std::vector<EntityPair> FactStore::cached_pairs(SpatialRelation relation, FrameNum frame) const {
    const auto* data = find_frame(frame);
    if (!data) return {};
    const auto& pairs = data->cached[slot(relation)];
    return {pairs.begin(), pairs.end()};
}

bool FactStore::can_answer_from_cache(SpatialRelation relation) const {
    auto cached = [&](SpatialRelation r) {
        return std::find(functors_.begin(), functors_.end(), r) != functors_.end();
    };
    if (cached(relation)) return true;
    if (auto swapped = swapped_equivalent(relation); swapped && cached(*swapped)) return true;
    return relation == SpatialRelation::outside && cached(SpatialRelation::overlapping);
}

void FactStore::check_threshold(SpatialRelation relation, const SpatialConfig* cfg) const {
    if (relation != SpatialRelation::near || cfg == nullptr || !threshold_) return;
    if (*threshold_ != cfg->near_threshold) {
        throw Error(ErrorCode::stale_cache, "cached near facts use threshold " + std::to_string(*threshold_) +
                                                "; query asked for " + std::to_string(cfg->near_threshold));
    }
}

bool FactStore::positive_cached(SpatialRelation relation, const EntityId& e1, const EntityId& e2,
                                FrameNum frame) const {
    auto cached = [&](SpatialRelation r) {
        return std::find(functors_.begin(), functors_.end(), r) != functors_.end();
    };
    if (cached(relation)) return has_cached(relation, e1, e2, frame);
    if (auto swapped = swapped_equivalent(relation); swapped && cached(*swapped)) {
        return has_cached(*swapped, e2, e1, frame);
    }
    if (relation == SpatialRelation::outside && cached(SpatialRelation::overlapping)) {
        return exists(e1, frame) && exists(e2, frame) && !has_cached(SpatialRelation::overlapping, e1, e2, frame);
    }
    throw Error(ErrorCode::unknown_relation,
                "relation " + std::string(to_string(relation)) + " is not answerable from the cache");
}

bool FactStore::cached_holds(const RelationRef& ref, const EntityId& e1, const EntityId& e2, FrameNum frame,
                             const SpatialConfig* cfg) const {
    require_processed(frame);
    check_threshold(ref.relation, cfg);
    if (e1 == e2) return false;
    auto s1 = statics_.find(e1);
    auto s2 = statics_.find(e2);
    if (s1 != statics_.end() && s2 != statics_.end()) {
        // Pairs of static regions are frame-independent and never cached.
        const SpatialConfig fixed{threshold_.value_or(cfg ? cfg->near_threshold : SpatialConfig{}.near_threshold)};
        return relation_holds(ref.relation, s1->second.bounds, s2->second.bounds, fixed) != ref.negated;
    }
    if (!ref.negated) return positive_cached(ref.relation, e1, e2, frame);
    return exists(e1, frame) && exists(e2, frame) && !positive_cached(ref.relation, e1, e2, frame);
}

std::vector<RelationFact> FactStore::query_cached(const RelationRef& ref, const std::optional<EntityId>& e1,
                                                  const std::optional<EntityId>& e2,
                                                  const std::optional<FrameNum>& frame,
                                                  const SpatialConfig* cfg) const {
    check_threshold(ref.relation, cfg);
    if (!can_answer_from_cache(ref.relation)) {
        throw Error(ErrorCode::unknown_relation,
                    "relation " + format(ref) + " is not answerable from the cache");
    }
    std::vector<FrameNum> frames;
    if (frame) {
        require_processed(*frame);
        frames.push_back(*frame);
    } else if (low_frame_ && high_water_) {
        for (const auto& [f, _] : frames_) {
            if (f <= *high_water_) frames.push_back(f);
        }
        if (!statics_.empty()) {
            frames.clear();
            for (FrameNum f = *low_frame_; f <= *high_water_; ++f) frames.push_back(f);
        }
    }
    std::vector<RelationFact> out;
    for (FrameNum f : frames) {
        const auto people = participants(f);
        std::vector<EntityId> firsts, seconds;
        for (const auto& p : people) {
            if (!e1 || *e1 == p.id) firsts.push_back(p.id);
            if (!e2 || *e2 == p.id) seconds.push_back(p.id);
        }
        std::sort(firsts.begin(), firsts.end());
        std::sort(seconds.begin(), seconds.end());
        for (const auto& a : firsts) {
            for (const auto& b : seconds) {
                if (a != b && cached_holds(ref, a, b, f, nullptr)) out.push_back({ref.relation, a, b, f});
            }
        }
    }
    return out;
}

// -- progress ----------------------------------------------------------------

void FactStore::set_high_water(FrameNum frame) {
    if (high_water_ && frame < *high_water_) {
        throw Error(ErrorCode::invalid_argument, "high-water mark cannot move back from " +
                                                     std::to_string(*high_water_) + " to " + std::to_string(frame));
    }
    high_water_ = frame;
    note_frame(frame);
}

std::optional<std::pair<FrameNum, FrameNum>> FactStore::frame_range() const {
    if (!high_water_ || !low_frame_) return std::nullopt;
    return std::pair{*low_frame_, *high_water_};
}

bool FactStore::is_processed(FrameNum frame) const { return high_water_ && frame <= *high_water_; }

void FactStore::require_processed(FrameNum frame) const {
    if (!is_processed(frame)) {
        throw Error(ErrorCode::not_processed,
                    frame_label(frame) + " is above the high-water mark (" +
                        (high_water_ ? std::to_string(*high_water_) : std::string("nothing processed")) + ")");
    }
}

std::size_t FactStore::basic_fact_count() const {
    std::size_t n = 0;
    for (const auto& [_, data] : frames_) n += data->entities.size();
    return n * 5;
}

std::size_t FactStore::cached_fact_count() const {
    std::size_t n = 0;
    for (const auto& [_, data] : frames_) {
        for (const auto& pairs : data->cached) n += pairs.size();
    }
    return n;
}

std::vector<FrameNum> FactStore::populated_frames() const {
    std::vector<FrameNum> out;
    for (const auto& [f, data] : frames_) {
        if (!data->entities.empty()) out.push_back(f);
    }
    return out;
}

void FactStore::restore_progress(std::optional<FrameNum> low, std::optional<FrameNum> high_water) {
    low_frame_ = low;
    high_water_ = high_water;
}

const FactStore::FrameData* FactStore::find_frame(FrameNum frame) const {
    auto it = frames_.find(frame);
    return it == frames_.end() ? nullptr : it->second.get();
}

FactStore::FrameData& FactStore::writable_frame(FrameNum frame) {
    auto& ptr = frames_[frame];
    if (!ptr) {
        ptr = std::make_shared<FrameData>();
    } else if (ptr.use_count() > 1) {
        ptr = std::make_shared<FrameData>(*ptr);
    }
    return *ptr;
}

void FactStore::note_frame(FrameNum frame) {
    if (!low_frame_ || frame < *low_frame_) low_frame_ = frame;
}

// -- StoreHandle ---------------------------------------------------------------

StoreHandle::StoreHandle(FactStore initial)
    : working_(std::move(initial)), published_(std::make_shared<const FactStore>(working_)) {}

std::shared_ptr<const FactStore> StoreHandle::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return published_;
}

void StoreHandle::publish() {
    auto next = std::make_shared<const FactStore>(working_);
    std::lock_guard lock(snapshot_mutex_);
    published_ = std::move(next);
}

}  // namespace versa
