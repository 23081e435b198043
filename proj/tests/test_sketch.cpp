#include "support/oracles.hpp"

#include "versa/error.hpp"
#include "versa/sketch.hpp"
#include "versa/template_io.hpp"

#include <doctest.h>

#include <random>

using namespace versa;

namespace {

SketchEntity drawn(std::string id, EntityType type, double xc, double yc, double w, double h) {
    return {std::move(id), type, {{xc, yc}, w, h}, 0.0};
}

oracle::Box as_box(const SketchEntity& e) { return {e.box.center.x, e.box.center.y, e.box.width, e.box.height}; }

}  // namespace

TEST_CASE("a person with a dropped object") {
    Sketch s{"f1", {drawn("P0", EntityType::person, 100, 100, 20, 40), drawn("O1", EntityType::object, 130, 100, 10, 10)},
             {}};
    const auto t = sketch_to_frame_template(s);
    CHECK(format(t) == "frametemplate(f1, [object:O1, person:P0], [near_kb(O1,P0), moreLeft_kb(P0,O1), leftOf_kb(P0,O1)], [])");

    SpatialConfig tight;
    tight.near_threshold = 30;  // distance is exactly 30
    const auto t2 = sketch_to_frame_template(s, tight);
    CHECK(format(t2) == "frametemplate(f1, [object:O1, person:P0], [moreLeft_kb(P0,O1), leftOf_kb(P0,O1)], [])");
}

TEST_CASE("sketch variables") {
    CHECK(sketch_variable("p1", EntityType::person) == "P1");
    CHECK(sketch_variable("bag", EntityType::object) == "Bag");
    CHECK(sketch_variable("7", EntityType::person) == "P7");
    CHECK(sketch_variable("7", EntityType::object) == "O7");
    CHECK(sketch_variable("storefront", EntityType::static_region) == "storefront");
}

TEST_CASE("degenerate and invalid sketches") {
    Sketch one{"solo", {drawn("P1", EntityType::person, 10, 10, 5, 5)}, {{"O1", EntityType::object}}};
    const auto t = sketch_to_frame_template(one);
    CHECK(t.relations.empty());
    CHECK(format(t) == "frametemplate(solo, [person:P1], [], [O1])");

    Sketch dup{"d", {drawn("P1", EntityType::person, 10, 10, 5, 5), drawn("P1", EntityType::person, 50, 10, 5, 5)}, {}};
    CHECK_THROWS_AS(sketch_to_frame_template(dup), Error);

    Sketch collide{"c", {drawn("p1", EntityType::person, 10, 10, 5, 5), drawn("P1", EntityType::person, 50, 10, 5, 5)},
                   {}};
    CHECK_THROWS_AS(sketch_to_frame_template(collide), Error);

    Sketch both{"b", {drawn("P1", EntityType::person, 10, 10, 5, 5)}, {{"P1", EntityType::person}}};
    CHECK_THROWS_AS(sketch_to_frame_template(both), Error);

    Sketch upper_static{"s", {drawn("Door", EntityType::static_region, 10, 10, 5, 5)}, {}};
    CHECK_THROWS_AS(sketch_to_frame_template(upper_static), Error);

    Sketch bad_box{"w", {drawn("P1", EntityType::person, 10, 10, -5, 5)}, {}};
    CHECK_THROWS_AS(sketch_to_frame_template(bad_box), Error);
}

TEST_CASE("static areas stay constants and never pair with each other") {
    Sketch s{"shop",
             {drawn("storefront", EntityType::static_region, 255, 175, 220, 40),
              drawn("door", EntityType::static_region, 250, 175, 20, 20),
              drawn("P1", EntityType::person, 255, 175, 20, 40)},
             {}};
    const auto t = sketch_to_frame_template(s);
    for (const auto& r : t.relations) CHECK((r.first.text == "P1" || r.second.text == "P1"));
    const auto text = format(t);
    CHECK(text.find("inside_kb(P1,storefront)") != std::string::npos);
    CHECK(text.find("overlapping_kb(P1,door)") != std::string::npos);
}

TEST_CASE("sketch relations agree with the geometric oracle") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pos(0, 200), size(4, 60);
    for (int round = 0; round < 200; ++round) {
        Sketch s{"r", {}, {}};
        const int n = 2 + round % 3;
        for (int i = 0; i < n; ++i) {
            const auto type = i % 2 ? EntityType::object : EntityType::person;
            s.entities.push_back(drawn(std::to_string(i), type, pos(rng), pos(rng), size(rng), size(rng)));
        }
        std::vector<const SketchEntity*> order;
        for (const auto& e : s.entities) order.push_back(&e);
        std::stable_sort(order.begin(), order.end(),
                         [](auto* a, auto* b) { return to_string(a->type) < to_string(b->type); });
        std::vector<std::string> want;
        for (auto r : kDefaultCachedRelations) {
            const std::string name(to_string(r));
            for (std::size_t i = 0; i < order.size(); ++i)
                for (std::size_t j = 0; j < order.size(); ++j) {
                    if (i == j || (is_symmetric(r) && j < i)) continue;
                    if (oracle::spatial(name, as_box(*order[i]), as_box(*order[j]), 50))
                        want.push_back(name + "_kb(" + sketch_variable(order[i]->id, order[i]->type) + "," +
                                       sketch_variable(order[j]->id, order[j]->type) + ")");
                }
        }
        std::vector<std::string> got;
        for (const auto& r : sketch_to_frame_template(s).relations) got.push_back(format(r));
        CHECK(got == want);
    }
}
