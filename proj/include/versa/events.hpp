#pragma once

#include "versa/interval_set.hpp"
#include "versa/kb.hpp"
#include "versa/templates.hpp"
#include "versa/temporal.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace versa {

enum class StepMode { instant, interval };

std::string_view to_string(StepMode mode);
StepMode parse_step_mode(std::string_view text);

/// One key frame (instant) or key interval of an event.
struct EventStep {
    std::string id;
    FrameTemplate frame_template;
    StepMode mode = StepMode::instant;
    double threshold = 1.0;
};

/// `relation(first, second)` over the times chosen for two steps. Names are
/// the instant relations `before`/`after` or any interval relation.
struct TemporalConstraint {
    std::string relation;
    std::string first;
    std::string second;

    friend bool operator==(const TemporalConstraint&, const TemporalConstraint&) = default;
};

/// Steps are searched in the listed order, which need not be temporal
/// order: the first step is the anchor that grounds the variables later
/// steps test for absence. Steps share bindings through variable names.
struct EventTemplate {
    std::string id;
    std::vector<EventStep> steps;
    std::vector<TemporalConstraint> constraints;

    const EventStep* step(std::string_view step_id) const;
    void validate() const;
};

enum class SearchMode { first, all };

/// Counters filled in by evaluate_event for instrumentation.
struct EvalStats {
    std::size_t anchor_frames = 0;          // frames scanned for the first step
    std::optional<FrameNum> lowest_anchor_frame;
    std::size_t step_frames = 0;            // frames scanned for any step
};

struct EvalOptions {
    SearchMode mode = SearchMode::all;
    /// Only anchors whose frame (or interval start) lies above the cursor
    /// are explored.
    std::optional<FrameNum> cursor;
    /// Only anchors whose frame (or interval start) is at most this value.
    std::optional<FrameNum> anchor_until;
    MatchOptions match;
    EvalStats* stats = nullptr;
};

struct StepResult {
    std::string step;
    TimeRef when;

    friend bool operator==(const StepResult&, const StepResult&) = default;
};

struct Detection {
    std::string event;
    Bindings bindings;
    std::vector<StepResult> steps;  // in template step order
    FrameNum detected_at = 0;       // latest frame any step relies on

    const TimeRef& anchor() const { return steps.front().when; }
    const TimeRef* when(std::string_view step) const;
    /// Event id, bindings and anchor: stable across repeated evaluations.
    std::string key() const;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Depth-first search over step matches. In `all` mode each anchor
/// candidate (anchor time plus its bindings) yields at most one detection:
/// the one with the earliest later-step times in step order.
std::vector<Detection> evaluate_event(const FactStore& store, const EventTemplate& event,
                                      const EvalOptions& opts = {});

/// Replays a detection's steps and constraints against the store.
bool verify_detection(const FactStore& store, const EventTemplate& event, const Detection& detection,
                      const MatchOptions& opts = {});

/// Person P is near object O (anchor), P was seen earlier without O, and P
/// is later in view but no longer near O.
EventTemplate left_item_template();

struct LeftItem {
    EntityId person;
    EntityId object;
    FrameNum prior = 0;
    FrameNum anchor = 0;
    FrameNum after = 0;

    friend bool operator==(const LeftItem&, const LeftItem&) = default;
};

std::vector<LeftItem> left_item(const FactStore& store, SearchMode mode = SearchMode::first,
                                const EvalOptions& opts = {});

struct Loitering {
    EntityId id;
    FrameNum start = 0;
    FrameNum end = 0;

    friend bool operator==(const Loitering&, const Loitering&) = default;
};

/// People whose overlap with static region `area`, after closing gaps with
/// `radius`, lasts longer than `duration` frames (End - Start > duration).
std::vector<Loitering> loitering_in(const FactStore& store, const EntityId& area, FrameNum duration,
                                    FrameNum radius = 1, const MatchOptions& opts = {});

/// Per-person interval sets of frames where the person overlaps `area`.
IntervalSetTimestampList overlap_timeline(const FactStore& store, const EntityId& area,
                                          const MatchOptions& opts = {});

/// A step's bar in the sequencing timeline, in layout coordinates.
struct TimelineBar {
    std::string step;
    double x0 = 0.0;
    double x1 = 0.0;
};

/// Relations between every ordered pair of distinct bars, checked for
/// int_equals, int_before, int_during, int_starts, int_finishes, int_meets
/// and int_overlaps, in that order.
std::vector<TemporalConstraint> derive_temporal_constraints(std::span<const TimelineBar> bars);

std::string format(const Detection& detection);
std::string format(const TemporalConstraint& constraint);
/// Parses "int_before(a, b)".
TemporalConstraint parse_constraint(std::string_view text);

}  // namespace versa
