#include "support/oracles.hpp"

#include "versa/error.hpp"
#include "versa/interval_set.hpp"

#include <doctest.h>

#include <random>

using namespace versa;

namespace {

IntervalSet iset(std::vector<std::pair<FrameNum, FrameNum>> runs) {
    std::vector<TimeRef> m;
    for (auto [a, b] : runs) m.push_back({a, b});
    return IntervalSet::from_canonical(m);
}

std::vector<oracle::Run> runs_of(const IntervalSet& s) {
    std::vector<oracle::Run> out;
    for (const auto& m : s) out.emplace_back(m.begin, m.end);
    return out;
}

IntervalSet random_iset(std::mt19937& rng, FrameNum lo, FrameNum hi) {
    std::bernoulli_distribution on(0.45);
    std::vector<FrameNum> frames;
    for (FrameNum f = lo; f <= hi; ++f)
        if (on(rng)) frames.push_back(f);
    return make_iset(frames);
}

}  // namespace

TEST_CASE("canonical form") {
    CHECK(is_canonical(iset({{1, 3}, {5, 5}}).members()));
    CHECK_THROWS_AS(iset({{1, 3}, {4, 5}}), Error);  // adjacent
    CHECK_THROWS_AS(iset({{5, 6}, {1, 2}}), Error);  // unordered
    CHECK_THROWS_AS(iset({{3, 2}}), Error);

    const auto n = IntervalSet::from_intervals({{8, 9}, {1, 3}, {4, 5}, {2, 2}});
    CHECK(n == iset({{1, 5}, {8, 9}}));
    CHECK(format(n) == "[1--5, 8--9]");
    CHECK(n.contains(5));
    CHECK_FALSE(n.contains(6));
    CHECK(n.coverage() == 7);
}

TEST_CASE("make_iset and expand round-trip") {
    const std::vector<FrameNum> frames = {7, 3, 4, 5, 10, 4};
    const auto s = make_iset(frames);
    CHECK(format(s) == "[3--5, 7--7, 10--10]");
    CHECK(expand(s) == std::vector<FrameNum>{3, 4, 5, 7, 10});
    CHECK(make_iset(std::vector<FrameNum>{}).empty());
}

TEST_CASE("closing fills gaps of up to two frames") {
    const auto a = iset({{3, 4}, {6, 9}, {14, 16}});
    CHECK(close_iset(a, 1) == iset({{3, 9}, {14, 16}}));
    CHECK(close_iset(a, 0) == a);
    CHECK_THROWS_AS(close_iset(a, -1), Error);
}

TEST_CASE("closing agrees with the bit-string oracle") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = random_iset(rng, 0, 200);
        for (FrameNum r : {0, 1, 2, 3}) {
            const auto got = close_iset(s, r);
            REQUIRE(is_canonical(got.members()));
            CHECK(runs_of(got) == oracle::close_runs(runs_of(s), r));
        }
    }
}

TEST_CASE("find_intervals agrees with a cross-product scan") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s1 = random_iset(rng, 0, 30);
        const auto s2 = random_iset(rng, 0, 30);
        for (auto r : temporal::kAllenRelations) {
            std::vector<std::pair<TimeRef, TimeRef>> want;
            for (const auto& a : s1)
                for (const auto& b : s2) {
                    const bool proper = a.begin < a.end && b.begin < b.end;
                    const bool holds = proper ? oracle::allen(a.begin, a.end, b.begin, b.end) == to_string(r)
                                              : temporal::interval_relation(r, a, b);
                    if (holds) want.emplace_back(a, b);
                }
            CHECK(find_intervals(r, s1, s2) == want);
        }
    }
}

TEST_CASE("timestamp lists group into interval sets") {
    auto e = [](const char* k, FrameNum f) { return TimestampEntry{EntityId(k), f}; };
    const TimestampList tsl = {e("a", 14), e("a", 13), e("a", 12), e("b", 27),  e("a", 99), e("a", 100),
                               e("b", 50), e("c", 15), e("c", 16), e("c", 29), e("d", 100)};
    const auto grouped = iset_tsl(tsl);
    CHECK(format(grouped) == "[a-[12--14, 99--100], b-[27--27, 50--50], c-[15--16, 29--29], d-[100--100]]");
    REQUIRE(grouped.size() == 4);
    CHECK(grouped[0].iset == iset({{12, 14}, {99, 100}}));

    const auto sorted = tsl_sort_group(tsl);
    CHECK(sorted.front() == e("a", 12));
    CHECK(sorted[4] == e("a", 100));
    CHECK(sorted.back() == e("d", 100));
}

TEST_CASE("numeric keys sort numerically and before names") {
    const TimestampList tsl = {{EntityId(10), 1}, {EntityId(9), 1}, {EntityId("area"), 2}, {EntityId(9), 2}};
    CHECK(format(iset_tsl(tsl)) == "[9-[1--2], 10-[1--1], area-[2--2]]");
}
