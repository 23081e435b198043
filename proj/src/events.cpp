#include "versa/events.hpp"

#include "versa/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace versa {

std::string_view to_string(StepMode mode) { return mode == StepMode::instant ? "instant" : "interval"; }

StepMode parse_step_mode(std::string_view text) {
    if (text == "instant") return StepMode::instant;
    if (text == "interval") return StepMode::interval;
    throw Error(ErrorCode::template_error, "unknown step mode '" + std::string(text) + "'");
}

const EventStep* EventTemplate::step(std::string_view step_id) const {
    for (const auto& s : steps) {
        if (s.id == step_id) return &s;
    }
    return nullptr;
}

void EventTemplate::validate() const {
    const std::string label = "event template '" + id + "'";
    if (steps.empty()) throw Error(ErrorCode::template_error, label + " has no steps");
    std::set<std::string> ids;
    std::set<std::string> bound;
    for (const auto& s : steps) {
        if (s.id.empty()) throw Error(ErrorCode::template_error, label + ": step with empty id");
        if (!ids.insert(s.id).second) throw Error(ErrorCode::template_error, label + ": duplicate step " + s.id);
        s.frame_template.validate();
        if (!(s.threshold >= 0.0 && s.threshold <= 1.0)) {
            throw Error(ErrorCode::template_error, label + ": step " + s.id + " threshold outside [0, 1]");
        }
        for (const auto& n : s.frame_template.not_exists) {
            if (n.is_variable() && !bound.contains(n.text)) {
                throw Error(ErrorCode::template_error, label + ": step " + s.id + " forbids " + n.text +
                                                           " before any earlier step binds it");
            }
        }
        for (auto& v : s.frame_template.slot_variables()) bound.insert(std::move(v));
    }
    for (const auto& c : constraints) {
        if (!temporal::is_temporal_relation_name(c.relation)) {
            throw Error(ErrorCode::template_error, label + ": unknown temporal relation " + c.relation);
        }
        if (!ids.contains(c.first) || !ids.contains(c.second)) {
            throw Error(ErrorCode::template_error, label + ": constraint " + format(c) + " names an unknown step");
        }
    }
}

const TimeRef* Detection::when(std::string_view step) const {
    for (const auto& s : steps) {
        if (s.step == step) return &s.when;
    }
    return nullptr;
}

std::string Detection::key() const {
    std::string k = event + "|";
    for (const auto& [var, id] : bindings) k += var + "=" + id.str() + ";";
    return k + "|" + temporal::format(anchor());
}

namespace {

enum class Flow { next, anchor_done, stop };

class Search {
public:
    Search(const FactStore& store, const EventTemplate& event, const EvalOptions& opts)
        : store_(store), event_(event), opts_(opts), times_(event.steps.size()) {}

    std::vector<Detection> run() {
        descend(0, {});
        return std::move(found_);
    }

private:
    bool constraints_ok(std::size_t index) const {
        for (const auto& c : event_.constraints) {
            const auto a = step_index(c.first);
            const auto b = step_index(c.second);
            if (a != index && b != index) continue;
            if (!times_[a] || !times_[b]) continue;
            if (!temporal::temporal_holds(c.relation, *times_[a], *times_[b])) return false;
        }
        return true;
    }

    std::size_t step_index(const std::string& id) const {
        for (std::size_t i = 0; i < event_.steps.size(); ++i) {
            if (event_.steps[i].id == id) return i;
        }
        return event_.steps.size();
    }

    // Narrows the scan for an instant step using ordering constraints
    // against steps that already have a time.
    FrameWindow window_for(std::size_t index) const {
        FrameWindow w;
        auto lower = [&](FrameNum exclusive) { w.after = w.after ? std::max(*w.after, exclusive) : exclusive; };
        auto upper = [&](FrameNum inclusive) { w.until = w.until ? std::min(*w.until, inclusive) : inclusive; };
        if (index == 0) {
            if (opts_.cursor) lower(*opts_.cursor);
            if (opts_.anchor_until) upper(*opts_.anchor_until);
            return w;
        }
        for (const auto& c : event_.constraints) {
            const auto a = step_index(c.first);
            const auto b = step_index(c.second);
            const bool is_before = c.relation == "before" || c.relation == "int_before" || c.relation == "int_earlier";
            const bool is_after = c.relation == "after" || c.relation == "int_after";
            if (!is_before && !is_after) continue;
            if (a == index && b != index && times_[b]) {
                if (is_before) upper(times_[b]->begin - 1);
                else lower(times_[b]->end);
            } else if (b == index && a != index && times_[a]) {
                if (is_before) lower(times_[a]->end);
                else upper(times_[a]->begin - 1);
            }
        }
        return w;
    }

    Flow complete(const Bindings& bindings) {
        Detection d{event_.id, bindings, {}, 0};
        for (std::size_t i = 0; i < event_.steps.size(); ++i) {
            d.steps.push_back({event_.steps[i].id, *times_[i]});
            d.detected_at = i == 0 ? times_[i]->end : std::max(d.detected_at, times_[i]->end);
        }
        found_.push_back(std::move(d));
        return opts_.mode == SearchMode::first ? Flow::stop : Flow::anchor_done;
    }

    Flow try_candidate(std::size_t index, const TimeRef& when, const Bindings& bindings) {
        times_[index] = when;
        Flow flow = Flow::next;
        if (constraints_ok(index)) flow = descend(index + 1, bindings);
        times_[index].reset();
        if (index == 0 && flow == Flow::anchor_done) return Flow::next;
        return flow;
    }

    Flow descend(std::size_t index, const Bindings& bindings) {
        if (index == event_.steps.size()) return complete(bindings);
        const auto& step = event_.steps[index];
        Flow flow = Flow::next;

        if (step.mode == StepMode::instant) {
            const auto window = window_for(index);
            for_each_candidate_frame(store_, step.frame_template, window, [&](FrameNum f) {
                if (opts_.stats) {
                    ++opts_.stats->step_frames;
                    if (index == 0) {
                        ++opts_.stats->anchor_frames;
                        auto& low = opts_.stats->lowest_anchor_frame;
                        if (!low || f < *low) low = f;
                    }
                }
                for_each_frame_match(store_, step.frame_template, f, step.threshold, opts_.match, bindings,
                                     [&](const MatchResult& m) {
                                         Bindings merged = bindings;
                                         for (const auto& [k, v] : m.bindings) merged[k] = v;
                                         flow = try_candidate(index, TimeRef::instant(f), merged);
                                         return flow == Flow::next;
                                     });
                return flow == Flow::next;
            });
            return flow;
        }

        // Interval steps see whole runs, so they scan every frame and filter.
        const auto groups = iset_match_bindings(store_, step.frame_template, step.threshold, opts_.match, bindings);
        if (opts_.stats && index == 0) {
            if (auto r = store_.frame_range()) opts_.stats->anchor_frames += static_cast<std::size_t>(r->second - r->first + 1);
        }
        for (const auto& g : groups) {
            Bindings merged = bindings;
            for (const auto& [k, v] : g.bindings) merged[k] = v;
            for (const auto& member : g.iset) {
                if (index == 0) {
                    if (opts_.cursor && member.begin <= *opts_.cursor) continue;
                    if (opts_.anchor_until && member.begin > *opts_.anchor_until) continue;
                    if (opts_.stats) {
                        auto& low = opts_.stats->lowest_anchor_frame;
                        if (!low || member.begin < *low) low = member.begin;
                    }
                }
                flow = try_candidate(index, member, merged);
                if (flow != Flow::next) return flow;
            }
        }
        return flow;
    }

    const FactStore& store_;
    const EventTemplate& event_;
    const EvalOptions& opts_;
    std::vector<std::optional<TimeRef>> times_;
    std::vector<Detection> found_;
};

}  // namespace

std::vector<Detection> evaluate_event(const FactStore& store, const EventTemplate& event, const EvalOptions& opts) {
    event.validate();
    if (opts.cursor && store.high_water() && *opts.cursor > *store.high_water()) {
        throw Error(ErrorCode::invalid_argument, "cursor lies above the high-water mark");
    }
    return Search(store, event, opts).run();
}

bool verify_detection(const FactStore& store, const EventTemplate& event, const Detection& detection,
                      const MatchOptions& opts) {
    if (detection.steps.size() != event.steps.size()) return false;
    for (std::size_t i = 0; i < event.steps.size(); ++i) {
        const auto& step = event.steps[i];
        const auto& result = detection.steps[i];
        if (result.step != step.id) return false;
        if (step.mode == StepMode::instant) {
            if (!temporal::is_instant(result.when)) return false;
            if (!store.is_processed(result.when.begin)) return false;
            if (match_frame(store, step.frame_template, result.when.begin, step.threshold, opts, detection.bindings)
                    .empty()) {
                return false;
            }
        } else {
            bool found = false;
            for (const auto& g :
                 iset_match_bindings(store, step.frame_template, step.threshold, opts, detection.bindings)) {
                for (const auto& m : g.iset) found = found || m == result.when;
            }
            if (!found) return false;
        }
    }
    for (const auto& c : event.constraints) {
        const auto* a = detection.when(c.first);
        const auto* b = detection.when(c.second);
        if (!a || !b || !temporal::temporal_holds(c.relation, *a, *b)) return false;
    }
    return true;
}

EventTemplate left_item_template() {
    const auto P = Term::variable("P");
    const auto O = Term::variable("O");
    const RelationRef near{SpatialRelation::near, false};
    const RelationRef not_near{SpatialRelation::near, true};

    EventTemplate ev;
    ev.id = "left_item";
    ev.steps.push_back({"anchor",
                        {"anchor", {{EntityType::person, P}, {EntityType::object, O}}, {{near, P, O}}, {}},
                        StepMode::instant,
                        1.0});
    ev.steps.push_back({"prior", {"prior", {{EntityType::person, P}}, {}, {O}}, StepMode::instant, 1.0});
    ev.steps.push_back({"after",
                        {"after", {{EntityType::person, P}, {EntityType::object, O}}, {{not_near, P, O}}, {}},
                        StepMode::instant,
                        1.0});
    ev.constraints = {{"before", "prior", "anchor"}, {"after", "after", "anchor"}};
    return ev;
}

std::vector<LeftItem> left_item(const FactStore& store, SearchMode mode, const EvalOptions& opts) {
    EvalOptions o = opts;
    o.mode = mode;
    std::vector<LeftItem> out;
    for (const auto& d : evaluate_event(store, left_item_template(), o)) {
        out.push_back({d.bindings.at("P"), d.bindings.at("O"), d.when("prior")->begin, d.when("anchor")->begin,
                       d.when("after")->begin});
    }
    return out;
}

IntervalSetTimestampList overlap_timeline(const FactStore& store, const EntityId& area, const MatchOptions& opts) {
    if (!store.is_static(area)) {
        throw Error(ErrorCode::unknown_entity, "area " + area.str() + " is not a registered static entity");
    }
    TimestampList stamps;
    const RelationRef overlapping{SpatialRelation::overlapping, false};
    for (FrameNum f : store.populated_frames()) {
        if (!store.is_processed(f)) break;
        for (const auto& e : store.frame_entities(f)) {
            if (e.type != EntityType::person) continue;
            if (spatial::relation_query(store, overlapping, area, e.id, f, opts.source, opts.spatial)) {
                stamps.push_back({e.id, f});
            }
        }
    }
    return iset_tsl(stamps);
}

std::vector<Loitering> loitering_in(const FactStore& store, const EntityId& area, FrameNum duration, FrameNum radius,
                                    const MatchOptions& opts) {
    if (duration <= 0) throw Error(ErrorCode::invalid_argument, "loitering duration must be positive");
    if (radius < 0) throw Error(ErrorCode::invalid_argument, "smoothing radius must be non-negative");
    std::vector<Loitering> out;
    for (const auto& [id, iset] : overlap_timeline(store, area, opts)) {
        for (const auto& m : close_iset(iset, radius)) {
            if (m.end - m.begin > duration) out.push_back({id, m.begin, m.end});
        }
    }
    return out;
}

std::vector<TemporalConstraint> derive_temporal_constraints(std::span<const TimelineBar> bars) {
    using temporal::IntervalRelation;
    std::set<std::string> ids;
    for (const auto& b : bars) {
        if (!ids.insert(b.step).second) throw Error(ErrorCode::invalid_argument, "duplicate timeline bar " + b.step);
        if (!(b.x0 < b.x1)) throw Error(ErrorCode::invalid_argument, "timeline bar " + b.step + " has no width");
    }
    constexpr IntervalRelation functors[] = {IntervalRelation::equals, IntervalRelation::before,
                                             IntervalRelation::during, IntervalRelation::starts,
                                             IntervalRelation::finishes, IntervalRelation::meets,
                                             IntervalRelation::overlaps};
    std::vector<TemporalConstraint> out;
    for (auto r : functors) {
        for (const auto& a : bars) {
            for (const auto& b : bars) {
                if (a.step == b.step) continue;
                if (temporal::interval_holds(r, a.x0, a.x1, b.x0, b.x1)) {
                    out.push_back({std::string(temporal::to_string(r)), a.step, b.step});
                }
            }
        }
    }
    return out;
}

std::string format(const TemporalConstraint& c) { return c.relation + "(" + c.first + ", " + c.second + ")"; }

TemporalConstraint parse_constraint(std::string_view text) {
    auto strip = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = strip(text);
    const auto open = text.find('(');
    const auto comma = text.find(',');
    if (open == std::string_view::npos || comma == std::string_view::npos || comma < open || !text.ends_with(")")) {
        throw Error(ErrorCode::template_error, "constraint must look like rel(a, b): '" + std::string(text) + "'");
    }
    TemporalConstraint c{std::string(strip(text.substr(0, open))),
                         std::string(strip(text.substr(open + 1, comma - open - 1))),
                         std::string(strip(text.substr(comma + 1, text.size() - comma - 2)))};
    if (c.relation.empty() || c.first.empty() || c.second.empty()) {
        throw Error(ErrorCode::template_error, "incomplete constraint '" + std::string(text) + "'");
    }
    return c;
}

std::string format(const Detection& d) {
    std::string out = d.event;
    for (const auto& [var, id] : d.bindings) out += " " + var + "=" + id.str();
    for (const auto& s : d.steps) {
        out += " " + s.step + "=";
        out += temporal::is_instant(s.when) ? std::to_string(s.when.begin) : temporal::format(s.when);
    }
    return out;
}

}  // namespace versa
