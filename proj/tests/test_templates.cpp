#include "support/corpus.hpp"
#include "support/oracles.hpp"

#include "versa/error.hpp"
#include "versa/template_io.hpp"
#include "versa/templates.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

using namespace versa;

namespace {

FrameTemplate parse_template(const std::string& id, std::vector<std::string> types, std::vector<std::string> rels,
                             std::vector<std::string> absent = {}) {
    FrameTemplate t;
    t.id = id;
    for (const auto& s : types) t.type_list.push_back(parse_typed_term(s));
    for (const auto& s : rels) t.relations.push_back(parse_template_relation(s));
    for (const auto& s : absent) t.not_exists.push_back(Term{s});
    t.validate();
    return t;
}

oracle::Box box_of(const EntityView& e) {
    return {(e.bounds.min_x + e.bounds.max_x) / 2, (e.bounds.min_y + e.bounds.max_y) / 2,
            e.bounds.max_x - e.bounds.min_x, e.bounds.max_y - e.bounds.min_y};
}

using Row = std::pair<std::map<std::string, std::string>, double>;

// Every injective, type-correct assignment, scored directly from the boxes.
std::vector<Row> brute_force(const FactStore& store, const FrameTemplate& t, FrameNum f, double threshold) {
    std::vector<Row> out;
    for (const auto& n : t.not_exists)
        if (store.exists(n.entity(), f)) return out;
    const auto ents = store.participants(f);
    std::map<std::string, const EntityView*> chosen;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == t.type_list.size()) {
            auto pick = [&](const Term& term) -> const EntityView* {
                if (term.is_variable()) return chosen.at(term.text);
                for (const auto& e : ents)
                    if (e.id == term.entity()) return &e;
                return nullptr;
            };
            int ok = 0;
            for (const auto& r : t.relations) {
                const auto* a = pick(r.first);
                const auto* b = pick(r.second);
                bool holds = false;
                if (a && b) {
                    holds = oracle::spatial(std::string(to_string(r.relation.relation)), box_of(*a), box_of(*b), 50);
                    if (r.relation.negated) holds = !holds;
                }
                ok += holds;
            }
            const double score = t.relations.empty() ? 1.0 : double(ok) / double(t.relations.size());
            if (score + 1e-12 >= threshold) {
                Row row{{}, score};
                for (const auto& [v, e] : chosen) row.first[v] = e->id.str();
                out.push_back(row);
            }
            return;
        }
        const auto& slot = t.type_list[i];
        for (const auto& e : ents) {
            if (e.type != slot.type) continue;
            if (!slot.term.is_variable()) {
                if (e.id != slot.term.entity()) continue;
            }
            bool used = false;
            for (const auto& [v, c] : chosen) used = used || c->id == e.id;
            if (used) continue;
            const std::string key = slot.term.is_variable() ? slot.term.text : "#" + slot.term.text;
            chosen[key] = &e;
            go(i + 1);
            chosen.erase(key);
        }
    };
    go(0);
    for (auto& row : out) {
        for (auto it = row.first.begin(); it != row.first.end();) it = it->first[0] == '#' ? row.first.erase(it) : ++it;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Row> rows(const std::vector<MatchResult>& results) {
    std::vector<Row> out;
    for (const auto& m : results) {
        Row row{{}, m.score};
        for (const auto& [v, id] : m.bindings) row.first[v] = id.str();
        out.push_back(row);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("template text format") {
    const auto t = parse_template("f1", {"object:O1", "person:P1"}, {"near_kb(O1,P1)"});
    CHECK(format(t) == "frametemplate(f1, [object:O1, person:P1], [near_kb(O1,P1)], [])");
    const auto doc = frame_template_from_json(to_json(t, 0.85));
    CHECK(doc.tmpl == t);
    CHECK(doc.threshold == 0.85);
    CHECK(to_json(doc.tmpl, doc.threshold).dump() == to_json(t, 0.85).dump());
}

TEST_CASE("template validation") {
    CHECK_THROWS_AS(parse_template("x", {"person:P", "person:P"}, {}), Error);
    CHECK_THROWS_AS(parse_template("x", {"person:P"}, {"near(P,Q)"}), Error);
    CHECK_THROWS_AS(parse_template("x", {"person:P"}, {}, {"P"}), Error);
    CHECK_THROWS_AS(parse_template("x", {"robot:R"}, {}), Error);
    CHECK_THROWS_AS(parse_template("x", {"person:P"}, {"sideways(P,P)"}), Error);
    CHECK_THROWS_AS(frame_template_from_json(nlohmann::json{{"id", "x"}, {"type_list", {"person:P"}}, {"threshold", 1.5}}),
                    Error);
    CHECK_THROWS_AS(frame_template_from_json(nlohmann::json{{"version", 9}, {"id", "x"}, {"type_list", {"person:P"}}}),
                    Error);
}

TEST_CASE("frame signature") {
    const auto store = corpus::build(corpus::drop_scenario());
    const auto sig = frame_signature(store, 120);
    CHECK(format(sig) == "frame_sig(120, [object:2, person:1])");
}

TEST_CASE("match_frame equals brute-force enumeration on small frames") {
    const auto store = corpus::build(corpus::random_walk(17, 40, 4));
    const std::vector<FrameTemplate> templates = {
        parse_template("a", {"person:P", "object:O"}, {"near(P,O)"}),
        parse_template("b", {"person:A", "person:B"}, {"higher(A,B)", "not_overlapping(A,B)", "moreLeft(B,A)"}),
        parse_template("c", {"person:A", "person:B", "object:O"}, {"near(A,O)", "near(B,O)", "above(A,B)", "lower(O,A)"}),
        parse_template("d", {"person:P"}, {}),
        parse_template("e", {"person:P", "object:O"}, {"inside(O,P)", "outside(P,O)"}, {"3"}),
        parse_template("f", {"person:P", "person:1"}, {"rightOf(P,1)", "not_below(1,P)"}),
    };
    int compared = 0;
    for (const auto& t : templates)
        for (double th : {0.0, 0.25, 0.5, 0.75, 1.0})
            for (FrameNum f = 0; f < 40; ++f) {
                CHECK(rows(match_frame(store, t, f, th)) == brute_force(store, t, f, th));
                ++compared;
            }
    CHECK(compared == 6 * 5 * 40);
}

TEST_CASE("bindings are enumerated in ascending id order and are injective") {
    const auto store = corpus::build(corpus::random_walk(4, 10, 6));
    const auto t = parse_template("p", {"person:A", "person:B"}, {});
    for (FrameNum f = 0; f < 10; ++f) {
        const auto ms = match_frame(store, t, f, 1.0);
        for (std::size_t i = 0; i < ms.size(); ++i) {
            CHECK(ms[i].bindings.at("A") != ms[i].bindings.at("B"));
            if (i) {
                const auto prev = std::pair(ms[i - 1].bindings.at("A"), ms[i - 1].bindings.at("B"));
                CHECK(prev < std::pair(ms[i].bindings.at("A"), ms[i].bindings.at("B")));
            }
        }
    }
}

TEST_CASE("three of four relations: the 0.75 boundary") {
    corpus::Script s;
    s.put(0, EntityId(1), EntityType::person, {100, 100, 10, 10});
    s.put(0, EntityId(2), EntityType::object, {120, 110, 10, 10});
    const auto store = corpus::build(s);
    const auto t =
        parse_template("q", {"person:P", "object:O"}, {"near(P,O)", "moreLeft(P,O)", "higher(P,O)", "overlapping(P,O)"});
    const auto at75 = match_frame(store, t, 0, 0.75);
    REQUIRE(at75.size() == 1);
    CHECK(at75[0].score == doctest::Approx(0.75));
    CHECK(match_frame(store, t, 0, 0.80).empty());
    CHECK(match_frame(store, t, 0, 1.0).empty());
    CHECK_THROWS_AS(match_frame(store, t, 0, 1.01), Error);
    CHECK_THROWS_AS(match_frame(store, t, 0, -0.1), Error);
}

TEST_CASE("raising the threshold never adds matches") {
    const auto store = corpus::build(corpus::random_walk(23, 80, 6));
    const auto t = parse_template("m", {"person:A", "object:O"}, {"near(A,O)", "higher(A,O)", "not_overlapping(A,O)"});
    std::vector<std::set<std::pair<FrameNum, std::string>>> sets;
    for (double th : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::set<std::pair<FrameNum, std::string>> s;
        for (const auto& m : match(store, t, th)) s.emplace(m.frame, format_bindings(t, m.bindings));
        sets.push_back(s);
    }
    for (std::size_t i = 1; i < sets.size(); ++i)
        CHECK(std::includes(sets[i - 1].begin(), sets[i - 1].end(), sets[i].begin(), sets[i].end()));
    CHECK(sets.front().size() > sets.back().size());
}

TEST_CASE("interval-set matching") {
    const auto store = corpus::build(corpus::drop_scenario());
    const auto t = parse_template("f1", {"object:O1", "person:P1"}, {"near_kb(O1,P1)"});
    CHECK(format(iset_match(store, t, 1.0)) == "[100--139]");
    const auto groups = iset_match_bindings(store, t, 1.0);
    REQUIRE(groups.size() == 1);
    CHECK(format_bindings(t, groups[0].bindings) == "[object:2, person:1]");
    CHECK(groups[0].iset == iset_match(store, t, 1.0));

    std::vector<FrameNum> frames;
    for (const auto& m : match(store, t, 1.0)) frames.push_back(m.frame);
    CHECK(make_iset(frames) == iset_match(store, t, 1.0));
    CHECK(format(iset_match(store, t, 1.0, {}, {}, {120, 130})) == "[121--130]");
}

TEST_CASE("iset_match_bindings groups by binding in first-match order") {
    corpus::Script s;
    s.span(0, 9, EntityId(3), EntityType::person, {10, 10, 4, 4});
    s.span(0, 9, EntityId(4), EntityType::object, {20, 10, 4, 4});
    s.span(5, 9, EntityId(5), EntityType::person, {200, 10, 4, 4});
    s.span(10, 19, EntityId(5), EntityType::person, {25, 10, 4, 4});
    s.span(10, 19, EntityId(4), EntityType::object, {20, 10, 4, 4});
    const auto store = corpus::build(s);
    const auto t = parse_template("f1", {"object:O1", "person:P1"}, {"near_kb(O1,P1)"});
    const auto groups = iset_match_bindings(store, t, 1.0);
    REQUIRE(groups.size() == 2);
    CHECK(format_bindings(t, groups[0].bindings) + "-" + format(groups[0].iset) == "[object:4, person:3]-[0--9]");
    CHECK(format_bindings(t, groups[1].bindings) + "-" + format(groups[1].iset) == "[object:4, person:5]-[10--19]");
}

TEST_CASE("constants, presets and not-exists") {
    const auto store = corpus::build(corpus::drop_scenario());
    const auto with_const = parse_template("k", {"person:1", "object:O"}, {"near(1,O)"});
    const auto ms = match(store, with_const, 1.0);
    REQUIRE(ms.size() == 40);
    CHECK(ms[0].bindings == Bindings{{"O", EntityId(2)}});

    const auto wrong_type = parse_template("k", {"object:1"}, {});
    CHECK(match(store, wrong_type, 1.0).empty());

    const auto absent = parse_template("n", {"person:P"}, {}, {"O"});
    CHECK_THROWS_AS(match_frame(store, absent, 0, 1.0), Error);
    CHECK(match_frame(store, absent, 50, 1.0, {}, {{"O", EntityId(2)}}).size() == 1);
    CHECK(match_frame(store, absent, 120, 1.0, {}, {{"O", EntityId(2)}}).empty());
    CHECK_THROWS_AS(match_frame(store, absent, 500, 1.0, {}, {{"O", EntityId(2)}}), Error);
}

TEST_CASE("cached and entailed matching agree") {
    const auto store = corpus::build(corpus::random_walk(31, 120, 6));
    const MatchOptions entailed{spatial::RelationSource::entailed, {}};
    for (const auto& t : {parse_template("a", {"person:P", "object:O"}, {"near(P,O)", "not_below(O,P)"}),
                          parse_template("b", {"person:A", "person:B"}, {"leftOf(A,B)", "outside(A,B)", "rightOf(B,A)"}),
                          parse_template("c", {"object:O", "person:P"}, {"inside(O,P)", "lower(O,P)"}, {"9"})}) {
        for (double th : {0.3, 0.5, 1.0}) {
            CHECK(match(store, t, th) == match(store, t, th, entailed));
            CHECK(iset_match(store, t, th) == iset_match(store, t, th, entailed));
            CHECK(iset_match_bindings(store, t, th) == iset_match_bindings(store, t, th, entailed));
        }
    }
}

TEST_CASE("statics fill static slots") {
    FactStore store;
    store.assert_static_entity(EntityId("door"), {{100, 100}, 40, 40}, 0);
    corpus::Script s;
    s.span(0, 4, EntityId(1), EntityType::person, {110, 100, 10, 20});
    s.span(5, 9, EntityId(1), EntityType::person, {300, 100, 10, 20});
    corpus::feed(s, store, 0, 9);
    const auto t = parse_template("s", {"static:S", "person:P"}, {"overlapping(S,P)"});
    CHECK(format(iset_match(store, t, 1.0)) == "[0--4]");
    const auto byname = parse_template("s", {"person:P"}, {"near(door,P)"});
    CHECK(format(iset_match(store, byname, 1.0)) == "[0--4]");
}
