#include "versa/templates.hpp"

#include "versa/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace versa {

Term Term::variable(std::string name) {
    Term t{std::move(name)};
    if (!t.is_variable()) throw Error(ErrorCode::template_error, "'" + t.text + "' is not a variable name");
    return t;
}

Term Term::constant(const EntityId& id) { return Term{id.str()}; }

bool Term::is_variable() const {
    if (text.empty()) return false;
    const auto c = static_cast<unsigned char>(text.front());
    return std::isupper(c) || c == '_';
}

std::vector<std::string> FrameTemplate::slot_variables() const {
    std::vector<std::string> vars;
    for (const auto& t : type_list) {
        if (t.term.is_variable()) vars.push_back(t.term.text);
    }
    return vars;
}

void FrameTemplate::validate() const {
    const std::string label = id.empty() ? std::string("frame template") : "frame template '" + id + "'";
    std::set<std::string> slots;
    for (const auto& t : type_list) {
        if (t.term.text.empty()) throw Error(ErrorCode::template_error, label + ": empty type-list term");
        if (t.term.is_variable() && !slots.insert(t.term.text).second) {
            throw Error(ErrorCode::template_error, label + ": variable " + t.term.text + " appears twice");
        }
    }
    for (const auto& r : relations) {
        for (const Term* arg : {&r.first, &r.second}) {
            if (arg->text.empty()) throw Error(ErrorCode::template_error, label + ": empty relation argument");
            if (arg->is_variable() && !slots.contains(arg->text)) {
                throw Error(ErrorCode::template_error,
                            label + ": relation argument " + arg->text + " is not bound by the type list");
            }
        }
    }
    for (const auto& n : not_exists) {
        if (n.text.empty()) throw Error(ErrorCode::template_error, label + ": empty not-exists term");
        if (n.is_variable() && slots.contains(n.text)) {
            throw Error(ErrorCode::template_error,
                        label + ": " + n.text + " cannot be both required and forbidden");
        }
    }
}

FrameSignature frame_signature(const FactStore& store, FrameNum frame) {
    store.require_processed(frame);
    FrameSignature sig{frame, {}};
    for (const auto& e : store.frame_entities(frame)) sig.entries.emplace_back(e.type, e.id);
    std::sort(sig.entries.begin(), sig.entries.end(), [](const auto& a, const auto& b) {
        const auto ta = to_string(a.first);
        const auto tb = to_string(b.first);
        return ta != tb ? ta < tb : a.second < b.second;
    });
    return sig;
}

void validate_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "match threshold must lie in [0, 1]");
    }
}

namespace {

constexpr double kScoreEpsilon = 1e-12;

struct Slot {
    std::string variable;            // empty for constants
    std::vector<EntityId> candidates;
};

EntityId resolve(const Term& term, const Bindings& bound) {
    if (!term.is_variable()) return term.entity();
    return bound.at(term.text);
}

}  // namespace

bool for_each_frame_match(const FactStore& store, const FrameTemplate& tmpl, FrameNum frame, double threshold,
                          const MatchOptions& opts, const Bindings& preset,
                          const std::function<bool(const MatchResult&)>& sink) {
    validate_threshold(threshold);
    store.require_processed(frame);

    // Not-exists terms are hard constraints and must be ground.
    for (const auto& n : tmpl.not_exists) {
        EntityId id;
        if (n.is_variable()) {
            auto it = preset.find(n.text);
            if (it == preset.end()) {
                throw Error(ErrorCode::template_error,
                            "not-exists variable " + n.text + " must be bound before it is checked");
            }
            id = it->second;
        } else {
            id = n.entity();
        }
        if (store.exists(id, frame)) return true;
    }

    std::vector<Slot> slots;
    slots.reserve(tmpl.type_list.size());
    std::vector<EntityView> members;
    bool members_loaded = false;
    for (const auto& typed : tmpl.type_list) {
        Slot slot;
        std::optional<EntityId> fixed;
        if (!typed.term.is_variable()) {
            fixed = typed.term.entity();
        } else if (auto it = preset.find(typed.term.text); it != preset.end()) {
            fixed = it->second;
            slot.variable = typed.term.text;
        } else {
            slot.variable = typed.term.text;
        }
        if (fixed) {
            auto v = store.entity(*fixed, frame);
            if (!v || v->type != typed.type) return true;
            slot.candidates.push_back(*fixed);
        } else {
            if (!members_loaded) {
                members = store.participants(frame);
                members_loaded = true;
            }
            for (const auto& m : members) {
                if (m.type == typed.type) slot.candidates.push_back(m.id);
            }
            std::sort(slot.candidates.begin(), slot.candidates.end());
            if (slot.candidates.empty()) return true;
        }
        slots.push_back(std::move(slot));
    }

    const double total = static_cast<double>(tmpl.relations.size());
    std::vector<EntityId> chosen;
    chosen.reserve(slots.size());
    Bindings bound = preset;

    std::function<bool(std::size_t)> descend = [&](std::size_t depth) -> bool {
        if (depth == slots.size()) {
            std::size_t satisfied = 0;
            for (const auto& r : tmpl.relations) {
                if (spatial::relation_query(store, r.relation, resolve(r.first, bound), resolve(r.second, bound),
                                            frame, opts.source, opts.spatial)) {
                    ++satisfied;
                }
            }
            const double score = total == 0.0 ? 1.0 : static_cast<double>(satisfied) / total;
            if (score + kScoreEpsilon < threshold) return true;
            MatchResult result{frame, {}, score};
            for (std::size_t i = 0; i < slots.size(); ++i) {
                if (!slots[i].variable.empty()) result.bindings[slots[i].variable] = chosen[i];
            }
            return sink(result);
        }
        for (const auto& candidate : slots[depth].candidates) {
            if (std::find(chosen.begin(), chosen.end(), candidate) != chosen.end()) continue;
            chosen.push_back(candidate);
            if (!slots[depth].variable.empty()) bound[slots[depth].variable] = candidate;
            const bool keep_going = descend(depth + 1);
            chosen.pop_back();
            if (!keep_going) return false;
        }
        return true;
    };
    return descend(0);
}

std::vector<MatchResult> match_frame(const FactStore& store, const FrameTemplate& tmpl, FrameNum frame,
                                     double threshold, const MatchOptions& opts, const Bindings& preset) {
    tmpl.validate();
    std::vector<MatchResult> out;
    for_each_frame_match(store, tmpl, frame, threshold, opts, preset, [&](const MatchResult& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

void for_each_candidate_frame(const FactStore& store, const FrameTemplate& tmpl, const FrameWindow& window,
                              const std::function<bool(FrameNum)>& fn) {
    const auto range = store.frame_range();
    if (!range) return;
    FrameNum lo = range->first;
    FrameNum hi = range->second;
    if (window.after) lo = std::max(lo, *window.after + 1);
    if (window.until) hi = std::min(hi, *window.until);
    if (lo > hi) return;

    const bool needs_dynamic = std::any_of(tmpl.type_list.begin(), tmpl.type_list.end(), [&](const TypedTerm& t) {
        return t.type != EntityType::static_region;
    });
    if (needs_dynamic) {
        // Frames without dynamic entities cannot match.
        for (FrameNum f : store.populated_frames()) {
            if (f < lo) continue;
            if (f > hi) break;
            if (!fn(f)) return;
        }
        return;
    }
    for (FrameNum f = lo; f <= hi; ++f) {
        if (!fn(f)) return;
    }
}

std::vector<MatchResult> match(const FactStore& store, const FrameTemplate& tmpl, double threshold,
                               const MatchOptions& opts, const Bindings& preset, const FrameWindow& window) {
    tmpl.validate();
    validate_threshold(threshold);
    std::vector<MatchResult> out;
    for_each_candidate_frame(store, tmpl, window, [&](FrameNum f) {
        for_each_frame_match(store, tmpl, f, threshold, opts, preset, [&](const MatchResult& m) {
            out.push_back(m);
            return true;
        });
        return true;
    });
    return out;
}

IntervalSet iset_match(const FactStore& store, const FrameTemplate& tmpl, double threshold, const MatchOptions& opts,
                       const Bindings& preset, const FrameWindow& window) {
    tmpl.validate();
    validate_threshold(threshold);
    std::vector<FrameNum> frames;
    for_each_candidate_frame(store, tmpl, window, [&](FrameNum f) {
        bool any = false;
        for_each_frame_match(store, tmpl, f, threshold, opts, preset, [&](const MatchResult&) {
            any = true;
            return false;
        });
        if (any) frames.push_back(f);
        return true;
    });
    return make_iset(frames);
}

std::vector<BindingIntervals> iset_match_bindings(const FactStore& store, const FrameTemplate& tmpl,
                                                  double threshold, const MatchOptions& opts, const Bindings& preset,
                                                  const FrameWindow& window) {
    std::vector<Bindings> order;
    std::map<Bindings, std::vector<FrameNum>> frames;
    for (const auto& m : match(store, tmpl, threshold, opts, preset, window)) {
        auto [it, inserted] = frames.try_emplace(m.bindings);
        if (inserted) order.push_back(m.bindings);
        if (it->second.empty() || it->second.back() != m.frame) it->second.push_back(m.frame);
    }
    std::vector<BindingIntervals> out;
    out.reserve(order.size());
    for (auto& b : order) out.push_back({b, make_iset(frames[b])});
    return out;
}

std::string format_bindings(const FrameTemplate& tmpl, const Bindings& bindings) {
    std::string out = "[";
    bool first = true;
    for (const auto& t : tmpl.type_list) {
        if (!first) out += ", ";
        first = false;
        out += std::string(to_string(t.type)) + ":";
        if (t.term.is_variable()) {
            auto it = bindings.find(t.term.text);
            out += it == bindings.end() ? t.term.text : it->second.str();
        } else {
            out += t.term.text;
        }
    }
    return out + "]";
}

std::string format(const FrameSignature& sig) {
    std::string out = "frame_sig(" + std::to_string(sig.frame) + ", [";
    for (std::size_t i = 0; i < sig.entries.size(); ++i) {
        if (i) out += ", ";
        out += std::string(to_string(sig.entries[i].first)) + ":" + sig.entries[i].second.str();
    }
    return out + "])";
}

}  // namespace versa
