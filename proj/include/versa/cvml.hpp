#pragma once

#include "versa/entity.hpp"
#include "versa/geometry.hpp"
#include "versa/kb.hpp"
#include "versa/relations.hpp"

#include <expat.h>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace versa::cvml {

struct Hypothesis {
    std::string role;
    std::string movement;
    std::string context;
    std::string situation;
};

struct Object {
    std::int64_t id = 0;
    /// Degrees clockwise from straight up.
    double orientation = 0.0;
    geometry::BoxSpec box;
    std::string appearance;
    std::vector<Hypothesis> hypotheses;
};

/// Group annotations are parsed for completeness but never become entities.
struct Group {
    std::int64_t id = 0;
    double orientation = 0.0;
    std::optional<geometry::BoxSpec> box;
    std::vector<std::int64_t> members;
    std::string appearance;
    std::vector<Hypothesis> hypotheses;
};

struct Frame {
    FrameNum number = 0;
    std::vector<Object> objects;
    std::vector<Group> groups;
};

struct Dataset {
    std::string name;
    std::vector<Frame> frames;  // ascending by number
};

/// Maps the role of an object's first hypothesis to an entity type.
class TypeMapping {
public:
    /// walker, browser, fighter -> person; everything else -> object.
    static TypeMapping defaults();
    /// Parses `role = person|object` lines; `#` starts a comment. Entries
    /// override the defaults.
    static TypeMapping from_text(std::string_view text, TypeMapping base = defaults());
    static TypeMapping load(const std::filesystem::path& path);

    void set(std::string role, EntityType type);
    EntityType lookup(std::string_view role) const;
    EntityType default_type() const noexcept { return default_; }
    const std::map<std::string, EntityType, std::less<>>& entries() const noexcept { return roles_; }

private:
    std::map<std::string, EntityType, std::less<>> roles_;
    EntityType default_ = EntityType::object;
};

/// Incremental parser: feed arbitrary chunks of a CVML document and receive
/// each `<frame>` as soon as its closing tag has been read.
class StreamParser {
public:
    using FrameCallback = std::function<void(Frame)>;

    explicit StreamParser(FrameCallback on_frame);
    ~StreamParser();
    StreamParser(const StreamParser&) = delete;
    StreamParser& operator=(const StreamParser&) = delete;

    /// Throws parse_error on malformed input or invalid annotations.
    void feed(std::string_view chunk);
    /// Signals end of input; throws if the document is incomplete.
    void finish();

    const std::string& dataset_name() const noexcept;
    /// True once the closing `</dataset>` tag has been read.
    bool complete() const noexcept;

    struct State;

private:
    void check();

    std::unique_ptr<State> state_;
    XML_Parser parser_ = nullptr;
};

Dataset parse_cvml(std::string_view document);
Dataset load_cvml(const std::filesystem::path& path);

/// Exact frame-number lookup; nullptr when the dataset has no such frame.
const Frame* frame_data(const Dataset& dataset, FrameNum number);

EntityType entity_type(const Object& object, const TypeMapping& mapping);

struct IngestConfig {
    SpatialConfig spatial;
    std::vector<SpatialRelation> functors{kDefaultCachedRelations.begin(), kDefaultCachedRelations.end()};
    TypeMapping mapping = TypeMapping::defaults();
};

/// Asserts the basic facts of every object in frame `number` (absent frames
/// assert nothing), entails and caches the configured relations, then
/// advances the high-water mark to `number`.
void process_frame(const Dataset& dataset, FrameNum number, FactStore& store, const IngestConfig& cfg);
void process_frame(const Frame* frame, FrameNum number, FactStore& store, const IngestConfig& cfg);

/// Processes every frame of the dataset in order.
void ingest(const Dataset& dataset, FactStore& store, const IngestConfig& cfg);

}  // namespace versa::cvml
