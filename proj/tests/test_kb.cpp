#include "support/corpus.hpp"

#include "versa/error.hpp"
#include "versa/kb.hpp"
#include "versa/snapshot.hpp"

#include <doctest.h>

#include <atomic>
#include <thread>

using namespace versa;

namespace {

EntityFrameFacts facts(std::int64_t id, FrameNum f, double xc, double yc, double w, double h,
                       EntityType type = EntityType::person, double orient = 0) {
    return {EntityId(id), f, type, geometry::rect_from_box({{xc, yc}, w, h}), {xc, yc}, orient};
}

}  // namespace

TEST_CASE("basic facts are retrievable and exists is implied") {
    FactStore store;
    store.assert_entity_facts(facts(0, 0, 184, 204, 55, 30, EntityType::person, 165));
    store.set_high_water(0);
    CHECK(store.exists(EntityId(0), 0));
    CHECK_FALSE(store.exists(EntityId(99), 0));
    const auto loc = store.query_basic(BasicKind::loc, EntityId(0), 0);
    REQUIRE(loc.size() == 1);
    CHECK(loc[0].entity.loc.x == 184);
    CHECK(loc[0].entity.loc.y == 204);
    CHECK(loc[0].entity.orient == 165);
    CHECK(loc[0].entity.type == EntityType::person);
    CHECK(loc[0].entity.bounds.min_x == 156.5);
    CHECK(store.query_basic(BasicKind::exists, EntityId(99), 0).empty());
    CHECK(store.basic_fact_count() == 5);
}

TEST_CASE("assertion errors") {
    FactStore store;
    store.assert_entity_facts(facts(1, 3, 10, 10, 2, 2));
    CHECK_THROWS_AS(store.assert_entity_facts(facts(1, 3, 10, 10, 2, 2)), Error);
    auto bad = facts(2, 3, 10, 10, 2, 2);
    bad.loc = {11, 10};
    CHECK_THROWS_AS(store.assert_entity_facts(bad), Error);
    store.set_high_water(3);
    CHECK_THROWS_AS(store.assert_entity_facts(facts(2, 3, 10, 10, 2, 2)), Error);
    CHECK_THROWS_AS(store.set_high_water(2), Error);
    store.assert_static_entity(EntityId("storefront"), {{255, 175}, 220, 40}, 0);
    CHECK_THROWS_AS(store.assert_static_entity(EntityId("storefront"), {{0, 0}, 1, 1}, 0), Error);
    CHECK_THROWS_AS(store.assert_static_entity(EntityId(1), {{0, 0}, 1, 1}, 0), Error);
}

TEST_CASE("statics exist in every frame") {
    FactStore store;
    store.assert_static_entity(EntityId("storefront"), {{255, 175}, 220, 40}, 0);
    CHECK(store.exists(EntityId("storefront"), 0));
    CHECK(store.exists(EntityId("storefront"), 1'000'000));
    const auto a = store.query_basic(BasicKind::bounds, EntityId("storefront"), 0);
    const auto b = store.query_basic(BasicKind::bounds, EntityId("storefront"), 1'000'000);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].entity.bounds.min_x == b[0].entity.bounds.min_x);
    CHECK(a[0].entity.bounds.max_y == b[0].entity.bounds.max_y);
    CHECK(a[0].entity.type == EntityType::static_region);
    CHECK(a[0].entity.bounds.min_x == 145);
    CHECK(a[0].entity.bounds.max_y == 195);
    store.assert_entity_facts(facts(1, 0, 10, 10, 2, 2));
    CHECK(store.entities_in_frame(0) == std::vector<EntityId>{EntityId(1)});
}

TEST_CASE("wildcard frame queries ascend and stop at the high-water mark") {
    FactStore store;
    for (FrameNum f : {5, 2, 9}) {
        if (store.high_water() && f <= *store.high_water()) continue;
        store.assert_entity_facts(facts(4, f, 10 + f, 10, 2, 2));
        store.set_high_water(f);
    }
    // frame 2 was skipped because it lay below the mark
    const auto all = store.query_basic(BasicKind::loc, EntityId(4), std::nullopt);
    REQUIRE(all.size() == 2);
    CHECK(all[0].frame == 5);
    CHECK(all[1].frame == 9);
    store.assert_entity_facts(facts(4, 12, 0, 0, 2, 2));
    CHECK(store.query_basic(BasicKind::loc, EntityId(4), std::nullopt).size() == 2);
    CHECK(store.frame_range() == std::pair<FrameNum, FrameNum>{5, 9});
    CHECK_THROWS_AS(store.require_processed(12), Error);
}

TEST_CASE("cached facts grow quadratically with entities per frame") {
    for (int n : {2, 4, 8}) {
        corpus::Script s;
        for (int i = 0; i < n; ++i) s.put(0, EntityId(i), EntityType::person, {10.0 + i, 10.0 + i, 100, 100});
        const auto store = corpus::build(s);
        // all boxes overlap and are near; every ordered pair carries both facts
        CHECK(store.cached_pairs(SpatialRelation::near, 0).size() == std::size_t(n * (n - 1)));
        CHECK(store.cached_pairs(SpatialRelation::overlapping, 0).size() == std::size_t(n * (n - 1)));
    }
}

TEST_CASE("snapshots round-trip byte for byte") {
    FactStore store;
    store.assert_static_entity(EntityId("zone"), {{100, 100}, 50, 30}, 0);
    corpus::feed(corpus::random_walk(8, 40, 5), store, 0, 39);
    const auto text = save_snapshot(store);
    const auto loaded = load_snapshot(text);
    CHECK(save_snapshot(loaded) == text);
    CHECK(loaded.high_water() == store.high_water());
    CHECK(loaded.cached_threshold() == store.cached_threshold());
    CHECK(loaded.cached_fact_count() == store.cached_fact_count());
    CHECK(loaded.basic_fact_count() == store.basic_fact_count());
    CHECK(save_snapshot(corpus::build(corpus::random_walk(8, 40, 5))) ==
          save_snapshot(corpus::build(corpus::random_walk(8, 40, 5))));
    CHECK_THROWS_AS(load_snapshot("{\"format\":\"other\"}"), Error);
    CHECK_THROWS_AS(load_snapshot("not json"), Error);
}

TEST_CASE("readers see published snapshots only") {
    const auto script = corpus::random_walk(21, 300, 4);
    StoreHandle handle;
    std::atomic<bool> done{false};
    std::atomic<int> violations{0};
    std::thread reader([&] {
        while (!done) {
            const auto snap = handle.snapshot();
            const auto hw = snap->high_water();
            for (FrameNum f : snap->populated_frames()) {
                if (!hw || f > *hw) ++violations;
            }
            if (hw) {
                for (auto r : kDefaultCachedRelations) {
                    if (!snap->cached_pairs(r, *hw + 1).empty()) ++violations;
                }
            }
        }
    });
    for (FrameNum f = 0; f < 300; ++f) {
        handle.write([&](FactStore& s) { corpus::feed(script, s, f, f); });
    }
    done = true;
    reader.join();
    CHECK(violations == 0);
    CHECK(handle.snapshot()->high_water() == 299);
}

TEST_CASE("copies do not see later writes") {
    FactStore a;
    a.assert_entity_facts(facts(1, 0, 10, 10, 2, 2));
    FactStore b = a;
    a.assert_entity_facts(facts(2, 0, 20, 10, 2, 2));
    CHECK(a.entities_in_frame(0).size() == 2);
    CHECK(b.entities_in_frame(0).size() == 1);
}
