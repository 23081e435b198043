#pragma once

#include "versa/entity.hpp"
#include "versa/temporal.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace versa {

using temporal::TimeRef;

/// Canonical set of inclusive frame intervals: ascending, disjoint and
/// non-adjacent (each member starts at least two frames after the previous
/// one ends).
class IntervalSet {
public:
    IntervalSet() = default;

    /// Adopts already-canonical members. Throws versa::Error otherwise.
    static IntervalSet from_canonical(std::vector<TimeRef> members);
    /// Normalizes arbitrary (possibly overlapping, unordered) intervals.
    static IntervalSet from_intervals(std::vector<TimeRef> members);

    const std::vector<TimeRef>& members() const noexcept { return members_; }
    bool empty() const noexcept { return members_.empty(); }
    std::size_t size() const noexcept { return members_.size(); }
    bool contains(FrameNum frame) const;
    /// Number of frames covered.
    FrameNum coverage() const;

    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<TimeRef> members_;
};

bool is_canonical(std::span<const TimeRef> members);

IntervalSet make_iset(std::span<const FrameNum> frames);
std::vector<FrameNum> expand(const IntervalSet& iset);

/// Every member pair (i1 from s1, i2 from s2) satisfying the relation, in
/// lexicographic member order.
std::vector<std::pair<TimeRef, TimeRef>> find_intervals(temporal::IntervalRelation relation,
                                                        const IntervalSet& s1, const IntervalSet& s2);

/// Morphological closing (dilate by `radius`, then erode). Fills every gap
/// of at most 2*radius frames and leaves everything else unchanged.
IntervalSet close_iset(const IntervalSet& iset, FrameNum radius);

struct TimestampEntry {
    EntityId key;
    FrameNum frame = 0;

    friend bool operator==(const TimestampEntry&, const TimestampEntry&) = default;
};
using TimestampList = std::vector<TimestampEntry>;

struct KeyedIntervalSet {
    EntityId key;
    IntervalSet iset;

    friend bool operator==(const KeyedIntervalSet&, const KeyedIntervalSet&) = default;
};
using IntervalSetTimestampList = std::vector<KeyedIntervalSet>;

/// Groups by key (ascending) and builds one canonical set per key.
IntervalSetTimestampList iset_tsl(const TimestampList& tsl);
/// Sorts by key, then frame. Duplicates are kept.
TimestampList tsl_sort_group(TimestampList tsl);

/// "[1--3, 5--5]"
std::string format(const IntervalSet& iset);
/// "[a-[12--14, 99--100], b-[27--27]]"
std::string format(const IntervalSetTimestampList& list);
std::string format(const TimestampList& list);

}  // namespace versa
