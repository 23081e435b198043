#pragma once

#include "versa/interval_set.hpp"
#include "versa/kb.hpp"
#include "versa/relations.hpp"
#include "versa/spatial.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace versa {

/// A template argument. Following the Prolog convention, a name starting
/// with an upper-case letter or '_' is a variable; anything else is an
/// entity constant.
struct Term {
    std::string text;

    static Term variable(std::string name);
    static Term constant(const EntityId& id);

    bool is_variable() const;
    EntityId entity() const { return EntityId(text); }

    friend bool operator==(const Term&, const Term&) = default;
};

struct TypedTerm {
    EntityType type = EntityType::object;
    Term term;

    friend bool operator==(const TypedTerm&, const TypedTerm&) = default;
};

struct TemplateRelation {
    RelationRef relation;
    Term first;
    Term second;

    friend bool operator==(const TemplateRelation&, const TemplateRelation&) = default;
};

/// Typed entity slots, the intra-frame relations that should hold between
/// them, and entities that must be absent from the frame.
struct FrameTemplate {
    std::string id;
    std::vector<TypedTerm> type_list;
    std::vector<TemplateRelation> relations;
    std::vector<Term> not_exists;

    /// Variables bound by the type list, in slot order.
    std::vector<std::string> slot_variables() const;
    /// Throws template_error when a variable repeats in the type list, when a
    /// relation argument is neither a slot variable nor a constant, or when a
    /// not-exists variable is also a slot.
    void validate() const;

    friend bool operator==(const FrameTemplate&, const FrameTemplate&) = default;
};

using Bindings = std::map<std::string, EntityId>;

struct FrameSignature {
    FrameNum frame = 0;
    std::vector<std::pair<EntityType, EntityId>> entries;  // sorted by type name, then id
};

struct MatchResult {
    FrameNum frame = 0;
    Bindings bindings;  // slot variables only
    double score = 1.0;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct MatchOptions {
    spatial::RelationSource source = spatial::RelationSource::cached;
    SpatialConfig spatial;
};

/// Restricts which frames a match scan visits.
struct FrameWindow {
    std::optional<FrameNum> after;  // exclusive lower bound
    std::optional<FrameNum> until;  // inclusive upper bound
};

FrameSignature frame_signature(const FactStore& store, FrameNum frame);

/// Throws invalid_argument unless 0 <= threshold <= 1.
void validate_threshold(double threshold);

/// Enumerates matches in one frame, calling `sink` for each; stops early when
/// `sink` returns false. Returns false if it was stopped.
///
/// `preset` supplies variables already bound by an enclosing evaluation:
/// slot variables found there are fixed, and not-exists variables must be
/// found there.
bool for_each_frame_match(const FactStore& store, const FrameTemplate& tmpl, FrameNum frame, double threshold,
                          const MatchOptions& opts, const Bindings& preset,
                          const std::function<bool(const MatchResult&)>& sink);

std::vector<MatchResult> match_frame(const FactStore& store, const FrameTemplate& tmpl, FrameNum frame,
                                     double threshold, const MatchOptions& opts = {}, const Bindings& preset = {});

/// Scans processed frames in ascending order.
std::vector<MatchResult> match(const FactStore& store, const FrameTemplate& tmpl, double threshold,
                               const MatchOptions& opts = {}, const Bindings& preset = {},
                               const FrameWindow& window = {});

/// Calls `fn` for every frame the scan would visit, in ascending order.
void for_each_candidate_frame(const FactStore& store, const FrameTemplate& tmpl, const FrameWindow& window,
                              const std::function<bool(FrameNum)>& fn);

IntervalSet iset_match(const FactStore& store, const FrameTemplate& tmpl, double threshold,
                       const MatchOptions& opts = {}, const Bindings& preset = {}, const FrameWindow& window = {});

struct BindingIntervals {
    Bindings bindings;
    IntervalSet iset;

    friend bool operator==(const BindingIntervals&, const BindingIntervals&) = default;
};

/// Groups matching frames by binding, in first-match order.
std::vector<BindingIntervals> iset_match_bindings(const FactStore& store, const FrameTemplate& tmpl,
                                                  double threshold, const MatchOptions& opts = {},
                                                  const Bindings& preset = {}, const FrameWindow& window = {});

/// "[object:4, person:3]" in type-list order.
std::string format_bindings(const FrameTemplate& tmpl, const Bindings& bindings);
std::string format(const FrameSignature& sig);

}  // namespace versa
