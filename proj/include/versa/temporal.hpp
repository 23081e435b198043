#pragma once

#include "versa/entity.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace versa::temporal {

/// An instant ([923]) or an inclusive interval ([923, 958]) of frames.
struct TimeRef {
    FrameNum begin = 0;
    FrameNum end = 0;

    static TimeRef instant(FrameNum frame) { return {frame, frame}; }
    /// Throws versa::Error when begin > end.
    static TimeRef interval(FrameNum begin, FrameNum end);

    friend bool operator==(const TimeRef&, const TimeRef&) = default;
    friend auto operator<=>(const TimeRef&, const TimeRef&) = default;
};

bool is_instant(const TimeRef& t);
bool is_interval(const TimeRef& t);
bool is_proper_interval(const TimeRef& t);

// Instant-interval relations over discrete frames.
TimeRef begin_of(const TimeRef& t);
TimeRef end_of(const TimeRef& t);
bool begins(const TimeRef& b, const TimeRef& t);
bool ends(const TimeRef& e, const TimeRef& t);
bool before(const TimeRef& x, const TimeRef& y);
bool after(const TimeRef& x, const TimeRef& y);
/// Strictly inside a proper interval; endpoints are excluded. Throws if
/// `instant` is not an instant.
bool inside(const TimeRef& instant, const TimeRef& interval);
/// Inside or at the begin frame, never at the end frame.
bool begins_or_in(const TimeRef& instant, const TimeRef& interval);
/// Checks that `span` is exactly the interval from `from` to `to`.
bool time_between(const TimeRef& span, const TimeRef& from, const TimeRef& to);
/// Builds the spanning interval between two instants, if `from` precedes `to`.
std::optional<TimeRef> time_between(const TimeRef& from, const TimeRef& to);

enum class IntervalRelation {
    equals,
    before,
    after,
    meets,
    met_by,
    overlaps,
    overlapped_by,
    starts,
    started_by,
    during,
    contains,
    finishes,
    finished_by,
    starts_or_during,
    nonoverlap,
};

/// The thirteen basic Allen relations, which partition proper-interval pairs.
inline constexpr std::array<IntervalRelation, 13> kAllenRelations = {
    IntervalRelation::equals,   IntervalRelation::before,        IntervalRelation::after,
    IntervalRelation::meets,    IntervalRelation::met_by,        IntervalRelation::overlaps,
    IntervalRelation::overlapped_by, IntervalRelation::starts,   IntervalRelation::started_by,
    IntervalRelation::during,   IntervalRelation::contains,      IntervalRelation::finishes,
    IntervalRelation::finished_by,
};

IntervalRelation converse(IntervalRelation r);
/// Name with the `int_` prefix, e.g. "int_overlaps".
std::string_view to_string(IntervalRelation r);
/// Accepts `int_*` names, `starts_or_during`, `nonoverlap`, and the legacy
/// `int_earlier` alias of `int_before`.
IntervalRelation parse_interval_relation(std::string_view name);
std::optional<IntervalRelation> try_parse_interval_relation(std::string_view name);

/// Endpoint-level definition shared by frame intervals and layout bars.
template <typename T>
bool interval_holds(IntervalRelation r, T a1, T b1, T a2, T b2) {
    switch (r) {
        case IntervalRelation::equals: return a1 == a2 && b1 == b2;
        case IntervalRelation::before: return b1 < a2;
        case IntervalRelation::after: return b2 < a1;
        case IntervalRelation::meets: return b1 == a2;
        case IntervalRelation::met_by: return b2 == a1;
        case IntervalRelation::overlaps: return a1 < a2 && a2 < b1 && b1 < b2;
        case IntervalRelation::overlapped_by: return a2 < a1 && a1 < b2 && b2 < b1;
        case IntervalRelation::starts: return a1 == a2 && b1 < b2;
        case IntervalRelation::started_by: return a1 == a2 && b2 < b1;
        case IntervalRelation::during: return a2 < a1 && b1 < b2;
        case IntervalRelation::contains: return a1 < a2 && b2 < b1;
        case IntervalRelation::finishes: return b1 == b2 && a2 < a1;
        case IntervalRelation::finished_by: return b1 == b2 && a1 < a2;
        case IntervalRelation::starts_or_during:
            return (a1 == a2 && b1 < b2) || (a2 < a1 && b1 < b2);
        case IntervalRelation::nonoverlap: return b1 < a2 || b2 < a1;
    }
    return false;
}

bool interval_relation(IntervalRelation r, const TimeRef& a, const TimeRef& b);

/// Evaluates a named temporal constraint: the instant relations `before` and
/// `after` or any interval relation name. Throws on unknown names.
bool temporal_holds(std::string_view name, const TimeRef& a, const TimeRef& b);
bool is_temporal_relation_name(std::string_view name);

std::string format(const TimeRef& t);

}  // namespace versa::temporal
