#pragma once

// Axis-aligned 2D geometry in image coordinates: origin at the top-left
// corner, y grows downward. "Higher" therefore means a smaller y.

namespace versa::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    Point center() const { return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}; }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// CVML-style box: center plus full width and height.
struct BoxSpec {
    Point center;
    double width = 0.0;
    double height = 0.0;

    friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

Rect rect_from_box(const BoxSpec& box);
BoxSpec box_from_rect(const Rect& rect);
/// Throws versa::Error when extents are inverted or not finite.
void validate(const Rect& rect);

double dist(Point a, Point b);

// All containment predicates are closed: touching edges count.
bool pt_inside(Point p, const Rect& r);
bool rect_inside(const Rect& inner, const Rect& outer);
bool overlaps(const Rect& a, const Rect& b);

// Center-point orderings. Equal centers satisfy none of them.
bool rect_higher(const Rect& a, const Rect& b);
bool rect_lower(const Rect& a, const Rect& b);
bool rect_left(const Rect& a, const Rect& b);
bool rect_right(const Rect& a, const Rect& b);

inline double min_x(const Rect& r) { return r.min_x; }
inline double max_x(const Rect& r) { return r.max_x; }
inline double min_y(const Rect& r) { return r.min_y; }
inline double max_y(const Rect& r) { return r.max_y; }

bool in_x_range(Point p, const Rect& r);
bool in_y_range(Point p, const Rect& r);
/// True when the x-projections of the two rectangles intersect.
bool in_x_range(const Rect& a, const Rect& b);
/// True when the y-projections of the two rectangles intersect.
bool in_y_range(const Rect& a, const Rect& b);

}  // namespace versa::geometry
