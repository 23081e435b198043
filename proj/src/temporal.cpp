#include "versa/temporal.hpp"

#include "versa/error.hpp"

namespace versa::temporal {

namespace {

void require_instant(const TimeRef& t, std::string_view relation) {
    if (!is_instant(t)) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(relation) + ": expected an instant, got " + format(t));
    }
}

struct NamedRelation {
    std::string_view name;
    IntervalRelation relation;
};

constexpr NamedRelation kNames[] = {
    {"int_equals", IntervalRelation::equals},
    {"int_before", IntervalRelation::before},
    {"int_after", IntervalRelation::after},
    {"int_meets", IntervalRelation::meets},
    {"int_met_by", IntervalRelation::met_by},
    {"int_overlaps", IntervalRelation::overlaps},
    {"int_overlapped_by", IntervalRelation::overlapped_by},
    {"int_starts", IntervalRelation::starts},
    {"int_started_by", IntervalRelation::started_by},
    {"int_during", IntervalRelation::during},
    {"int_contains", IntervalRelation::contains},
    {"int_finishes", IntervalRelation::finishes},
    {"int_finished_by", IntervalRelation::finished_by},
    {"starts_or_during", IntervalRelation::starts_or_during},
    {"nonoverlap", IntervalRelation::nonoverlap},
};

}  // namespace

TimeRef TimeRef::interval(FrameNum begin, FrameNum end) {
    if (begin > end) {
        throw Error(ErrorCode::invalid_argument,
                    "interval begin " + std::to_string(begin) + " exceeds end " + std::to_string(end));
    }
    return {begin, end};
}

bool is_instant(const TimeRef& t) { return t.begin == t.end; }
bool is_interval(const TimeRef& t) { return t.begin <= t.end; }
bool is_proper_interval(const TimeRef& t) { return t.begin < t.end; }

TimeRef begin_of(const TimeRef& t) { return TimeRef::instant(t.begin); }
TimeRef end_of(const TimeRef& t) { return TimeRef::instant(t.end); }

bool begins(const TimeRef& b, const TimeRef& t) { return b == begin_of(t); }
bool ends(const TimeRef& e, const TimeRef& t) { return e == end_of(t); }

bool before(const TimeRef& x, const TimeRef& y) { return x.end < y.begin; }
bool after(const TimeRef& x, const TimeRef& y) { return before(y, x); }

bool inside(const TimeRef& instant, const TimeRef& interval) {
    require_instant(instant, "inside");
    return is_proper_interval(interval) && interval.begin < instant.begin && instant.begin < interval.end;
}

bool begins_or_in(const TimeRef& instant, const TimeRef& interval) {
    require_instant(instant, "begins_or_in");
    return interval.begin <= instant.begin && instant.begin < interval.end;
}

bool time_between(const TimeRef& span, const TimeRef& from, const TimeRef& to) {
    auto built = time_between(from, to);
    return built && *built == span;
}

std::optional<TimeRef> time_between(const TimeRef& from, const TimeRef& to) {
    require_instant(from, "time_between");
    require_instant(to, "time_between");
    if (from.begin >= to.begin) return std::nullopt;
    return TimeRef{from.begin, to.begin};
}

IntervalRelation converse(IntervalRelation r) {
    switch (r) {
        case IntervalRelation::equals: return IntervalRelation::equals;
        case IntervalRelation::before: return IntervalRelation::after;
        case IntervalRelation::after: return IntervalRelation::before;
        case IntervalRelation::meets: return IntervalRelation::met_by;
        case IntervalRelation::met_by: return IntervalRelation::meets;
        case IntervalRelation::overlaps: return IntervalRelation::overlapped_by;
        case IntervalRelation::overlapped_by: return IntervalRelation::overlaps;
        case IntervalRelation::starts: return IntervalRelation::started_by;
        case IntervalRelation::started_by: return IntervalRelation::starts;
        case IntervalRelation::during: return IntervalRelation::contains;
        case IntervalRelation::contains: return IntervalRelation::during;
        case IntervalRelation::finishes: return IntervalRelation::finished_by;
        case IntervalRelation::finished_by: return IntervalRelation::finishes;
        case IntervalRelation::starts_or_during:
        case IntervalRelation::nonoverlap:
            break;
    }
    throw Error(ErrorCode::invalid_argument, std::string(to_string(r)) + " has no single converse");
}

std::string_view to_string(IntervalRelation r) {
    for (const auto& n : kNames) {
        if (n.relation == r) return n.name;
    }
    return "int_unknown";
}

std::optional<IntervalRelation> try_parse_interval_relation(std::string_view name) {
    if (name == "int_earlier") return IntervalRelation::before;
    for (const auto& n : kNames) {
        if (n.name == name) return n.relation;
    }
    return std::nullopt;
}

IntervalRelation parse_interval_relation(std::string_view name) {
    if (auto r = try_parse_interval_relation(name)) return *r;
    throw Error(ErrorCode::unknown_relation, "unknown interval relation '" + std::string(name) + "'");
}

bool interval_relation(IntervalRelation r, const TimeRef& a, const TimeRef& b) {
    return interval_holds(r, a.begin, a.end, b.begin, b.end);
}

bool temporal_holds(std::string_view name, const TimeRef& a, const TimeRef& b) {
    if (name == "before") return before(a, b);
    if (name == "after") return after(a, b);
    return interval_relation(parse_interval_relation(name), a, b);
}

bool is_temporal_relation_name(std::string_view name) {
    return name == "before" || name == "after" || try_parse_interval_relation(name).has_value();
}

std::string format(const TimeRef& t) { return std::to_string(t.begin) + "--" + std::to_string(t.end); }

}  // namespace versa::temporal
