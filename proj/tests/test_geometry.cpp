#include "versa/error.hpp"
#include "versa/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace versa::geometry;

TEST_CASE("rect_from_box uses center plus or minus half the size") {
    const auto r = rect_from_box({{184, 204}, 55, 30});
    CHECK(r.min_x == 156.5);
    CHECK(r.max_x == 211.5);
    CHECK(r.min_y == 189);
    CHECK(r.max_y == 219);

    const auto p = rect_from_box({{0, 0}, 0, 0});
    CHECK(p.min_x == 0);
    CHECK(p.max_x == 0);
    CHECK(p.width() == 0);

    const auto s = rect_from_box({{10, 10}, 2, 4});
    CHECK(s.min_x == 9);
    CHECK(s.max_x == 11);
    CHECK(s.min_y == 8);
    CHECK(s.max_y == 12);

    const auto back = box_from_rect(r);
    CHECK(back.center.x == 184);
    CHECK(back.center.y == 204);
    CHECK(back.width == 55);
    CHECK(back.height == 30);
}

TEST_CASE("negative sizes and inverted rects are rejected") {
    CHECK_THROWS_AS(validate(rect_from_box({{0, 0}, -1, 2})), versa::Error);
    CHECK_THROWS_AS(validate(Rect{2, 0, 1, 1}), versa::Error);
    CHECK_THROWS_AS(validate(Rect{0, 0, std::numeric_limits<double>::infinity(), 1}), versa::Error);
}

TEST_CASE("dist") {
    CHECK(dist({0, 0}, {3, 4}) == 5.0);
    CHECK(dist({7, 7}, {7, 7}) == 0.0);
    CHECK(dist({72, 76}, {78, 63}) == doctest::Approx(std::sqrt(205.0)));
}

TEST_CASE("containment is closed") {
    const auto obj0 = rect_from_box({{184, 204}, 55, 30});
    CHECK(pt_inside({184, 204}, obj0));
    CHECK(pt_inside({156.5, 189}, obj0));
    CHECK_FALSE(pt_inside({156.4, 204}, obj0));

    const Rect a{0, 0, 10, 10};
    CHECK(rect_inside(a, a));
    CHECK(rect_inside({2, 2, 3, 3}, a));
    CHECK_FALSE(rect_inside({2, 2, 11, 3}, a));

    CHECK(overlaps(a, {10, 10, 20, 20}));  // shared corner
    CHECK(overlaps(a, {10, 0, 20, 10}));   // shared edge
    CHECK_FALSE(overlaps(a, {10.5, 0, 20, 10}));
}

TEST_CASE("ordering uses centers with y growing downwards") {
    const Rect top{0, 0, 10, 10};
    const Rect bottom{0, 20, 10, 30};
    CHECK(rect_higher(top, bottom));
    CHECK(rect_lower(bottom, top));
    CHECK_FALSE(rect_higher(top, top));
    const Rect left{0, 0, 10, 10};
    const Rect right{5, 0, 15, 10};
    CHECK(rect_left(left, right));
    CHECK(rect_right(right, left));
}

TEST_CASE("range predicates") {
    const Rect r{10, 20, 30, 40};
    CHECK(in_x_range(Point{10, 0}, r));
    CHECK(in_x_range(Point{30, 100}, r));
    CHECK_FALSE(in_x_range(Point{31, 30}, r));
    CHECK(in_y_range(Point{0, 40}, r));
    CHECK(in_x_range(Rect{30, 0, 50, 1}, r));
    CHECK_FALSE(in_y_range(Rect{0, 41, 1, 50}, r));
    CHECK(min_x(r) == 10);
    CHECK(max_y(r) == 40);
}
