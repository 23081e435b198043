#include "versa/geometry.hpp"

#include "versa/error.hpp"

#include <cmath>

namespace versa::geometry {

Rect rect_from_box(const BoxSpec& box) {
    const double hw = box.width / 2.0;
    const double hh = box.height / 2.0;
    return {box.center.x - hw, box.center.y - hh, box.center.x + hw, box.center.y + hh};
}

BoxSpec box_from_rect(const Rect& rect) {
    return {rect.center(), rect.width(), rect.height()};
}

void validate(const Rect& r) {
    if (!std::isfinite(r.min_x) || !std::isfinite(r.min_y) || !std::isfinite(r.max_x) ||
        !std::isfinite(r.max_y)) {
        throw Error(ErrorCode::invalid_argument, "rectangle has non-finite coordinates");
    }
    if (r.min_x > r.max_x || r.min_y > r.max_y) {
        throw Error(ErrorCode::invalid_argument, "rectangle extents are inverted");
    }
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool pt_inside(Point p, const Rect& r) { return in_x_range(p, r) && in_y_range(p, r); }

bool rect_inside(const Rect& inner, const Rect& outer) {
    return inner.min_x >= outer.min_x && inner.max_x <= outer.max_x && inner.min_y >= outer.min_y &&
           inner.max_y <= outer.max_y;
}

bool overlaps(const Rect& a, const Rect& b) { return in_x_range(a, b) && in_y_range(a, b); }

bool rect_higher(const Rect& a, const Rect& b) { return a.center().y < b.center().y; }
bool rect_lower(const Rect& a, const Rect& b) { return a.center().y > b.center().y; }
bool rect_left(const Rect& a, const Rect& b) { return a.center().x < b.center().x; }
bool rect_right(const Rect& a, const Rect& b) { return a.center().x > b.center().x; }

bool in_x_range(Point p, const Rect& r) { return r.min_x <= p.x && p.x <= r.max_x; }
bool in_y_range(Point p, const Rect& r) { return r.min_y <= p.y && p.y <= r.max_y; }

bool in_x_range(const Rect& a, const Rect& b) { return a.min_x <= b.max_x && b.min_x <= a.max_x; }
bool in_y_range(const Rect& a, const Rect& b) { return a.min_y <= b.max_y && b.min_y <= a.max_y; }

}  // namespace versa::geometry
