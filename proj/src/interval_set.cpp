#include "versa/interval_set.hpp"

#include "versa/error.hpp"

#include <algorithm>
#include <map>

namespace versa {

bool is_canonical(std::span<const TimeRef> members) {
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i].begin > members[i].end) return false;
        if (i > 0 && members[i].begin <= members[i - 1].end + 1) return false;
    }
    return true;
}

IntervalSet IntervalSet::from_canonical(std::vector<TimeRef> members) {
    if (!is_canonical(members)) {
        throw Error(ErrorCode::invalid_argument, "interval members are not in canonical form");
    }
    IntervalSet s;
    s.members_ = std::move(members);
    return s;
}

IntervalSet IntervalSet::from_intervals(std::vector<TimeRef> members) {
    for (const auto& m : members) {
        if (m.begin > m.end) throw Error(ErrorCode::invalid_argument, "inverted interval " + temporal::format(m));
    }
    std::sort(members.begin(), members.end());
    IntervalSet s;
    for (const auto& m : members) {
        if (!s.members_.empty() && m.begin <= s.members_.back().end + 1) {
            s.members_.back().end = std::max(s.members_.back().end, m.end);
        } else {
            s.members_.push_back(m);
        }
    }
    return s;
}

bool IntervalSet::contains(FrameNum frame) const {
    auto it = std::upper_bound(members_.begin(), members_.end(), frame,
                               [](FrameNum f, const TimeRef& m) { return f < m.begin; });
    if (it == members_.begin()) return false;
    --it;
    return frame <= it->end;
}

FrameNum IntervalSet::coverage() const {
    FrameNum n = 0;
    for (const auto& m : members_) n += m.end - m.begin + 1;
    return n;
}

IntervalSet make_iset(std::span<const FrameNum> frames) {
    std::vector<TimeRef> members;
    members.reserve(frames.size());
    for (FrameNum f : frames) members.push_back(TimeRef::instant(f));
    return IntervalSet::from_intervals(std::move(members));
}

std::vector<FrameNum> expand(const IntervalSet& iset) {
    std::vector<FrameNum> frames;
    frames.reserve(static_cast<std::size_t>(iset.coverage()));
    for (const auto& m : iset) {
        for (FrameNum f = m.begin; f <= m.end; ++f) frames.push_back(f);
    }
    return frames;
}

std::vector<std::pair<TimeRef, TimeRef>> find_intervals(temporal::IntervalRelation relation,
                                                        const IntervalSet& s1, const IntervalSet& s2) {
    std::vector<std::pair<TimeRef, TimeRef>> out;
    for (const auto& a : s1) {
        for (const auto& b : s2) {
            if (temporal::interval_relation(relation, a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

IntervalSet close_iset(const IntervalSet& iset, FrameNum radius) {
    if (radius < 0) throw Error(ErrorCode::invalid_argument, "smoothing radius must be non-negative");
    if (radius == 0 || iset.empty()) return iset;

    // Dilate and merge. Merged runs are at least 2r+1 long, so eroding each
    // run never empties it and the gaps between runs only grow.
    std::vector<TimeRef> dilated;
    for (const auto& m : iset) {
        TimeRef d{m.begin - radius, m.end + radius};
        if (!dilated.empty() && d.begin <= dilated.back().end + 1) {
            dilated.back().end = std::max(dilated.back().end, d.end);
        } else {
            dilated.push_back(d);
        }
    }
    for (auto& d : dilated) {
        d.begin += radius;
        d.end -= radius;
    }
    return IntervalSet::from_canonical(std::move(dilated));
}

IntervalSetTimestampList iset_tsl(const TimestampList& tsl) {
    std::map<EntityId, std::vector<FrameNum>> grouped;
    for (const auto& e : tsl) grouped[e.key].push_back(e.frame);
    IntervalSetTimestampList out;
    out.reserve(grouped.size());
    for (auto& [key, frames] : grouped) out.push_back({key, make_iset(frames)});
    return out;
}

TimestampList tsl_sort_group(TimestampList tsl) {
    std::stable_sort(tsl.begin(), tsl.end(), [](const TimestampEntry& a, const TimestampEntry& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.frame < b.frame;
    });
    return tsl;
}

std::string format(const IntervalSet& iset) {
    std::string out = "[";
    for (std::size_t i = 0; i < iset.size(); ++i) {
        if (i) out += ", ";
        out += temporal::format(iset.members()[i]);
    }
    return out + "]";
}

std::string format(const IntervalSetTimestampList& list) {
    std::string out = "[";
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += list[i].key.str() + "-" + format(list[i].iset);
    }
    return out + "]";
}

std::string format(const TimestampList& list) {
    std::string out = "[";
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += list[i].key.str() + "-" + std::to_string(list[i].frame);
    }
    return out + "]";
}

}  // namespace versa
