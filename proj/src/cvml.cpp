#include "versa/cvml.hpp"

#include "versa/error.hpp"
#include "versa/spatial.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace versa::cvml {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> to_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<std::int64_t> to_integer(std::string_view text) {
    text = trim(text);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

const char* find_attr(const XML_Char** attrs, const char* name) {
    for (int i = 0; attrs[i]; i += 2) {
        if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
    }
    return nullptr;
}

}  // namespace

// -- TypeMapping ---------------------------------------------------------------

TypeMapping TypeMapping::defaults() {
    TypeMapping m;
    m.set("walker", EntityType::person);
    m.set("browser", EntityType::person);
    m.set("fighter", EntityType::person);
    return m;
}

TypeMapping TypeMapping::from_text(std::string_view text, TypeMapping base) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::parse_error, "type mapping line " + std::to_string(lineno) + ": expected 'role = type'");
        }
        auto role = trim(view.substr(0, eq));
        auto type = trim(view.substr(eq + 1));
        if (role.empty()) {
            throw Error(ErrorCode::parse_error, "type mapping line " + std::to_string(lineno) + ": empty role");
        }
        EntityType t = parse_entity_type(type);
        if (t == EntityType::static_region) {
            throw Error(ErrorCode::parse_error, "type mapping line " + std::to_string(lineno) +
                                                    ": roles map to person or object only");
        }
        base.set(std::string(role), t);
    }
    return base;
}

TypeMapping TypeMapping::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open type mapping " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

void TypeMapping::set(std::string role, EntityType type) { roles_[std::move(role)] = type; }

EntityType TypeMapping::lookup(std::string_view role) const {
    if (auto it = roles_.find(role); it != roles_.end()) return it->second;
    return default_;
}

EntityType entity_type(const Object& object, const TypeMapping& mapping) {
    if (object.hypotheses.empty()) return mapping.default_type();
    return mapping.lookup(trim(object.hypotheses.front().role));
}

// -- streaming parser ------------------------------------------------------------

struct StreamParser::State {
    FrameCallback on_frame;
    std::string dataset_name;
    bool in_dataset = false;
    bool complete = false;
    std::optional<FrameNum> last_frame;

    std::optional<Frame> frame;
    std::optional<Object> object;
    std::optional<Group> group;
    bool object_has_box = false;
    std::optional<Hypothesis> hypothesis;
    std::set<std::int64_t> object_ids;

    std::vector<std::string> stack;
    std::string text;
    std::string error;

    XML_Parser parser = nullptr;

    void fail(std::string message) {
        if (error.empty()) {
            error = std::move(message);
            XML_StopParser(parser, XML_FALSE);
        }
    }

    std::string where() const {
        std::string w;
        if (frame) w += "frame " + std::to_string(frame->number);
        if (object) w += (w.empty() ? "" : ", ") + std::string("object ") + std::to_string(object->id);
        if (group) w += (w.empty() ? "" : ", ") + std::string("group ") + std::to_string(group->id);
        return w.empty() ? std::string("document") : w;
    }

    std::optional<geometry::BoxSpec> read_box(const XML_Char** attrs) {
        const char* names[] = {"h", "w", "xc", "yc"};
        double values[4];
        for (int i = 0; i < 4; ++i) {
            const char* raw = find_attr(attrs, names[i]);
            if (!raw) {
                fail(where() + ": box is missing attribute '" + names[i] + "'");
                return std::nullopt;
            }
            auto v = to_number(raw);
            if (!v) {
                fail(where() + ": box attribute '" + names[i] + "' is not numeric: '" + raw + "'");
                return std::nullopt;
            }
            values[i] = *v;
        }
        if (values[0] < 0 || values[1] < 0) {
            fail(where() + ": box size must be non-negative");
            return std::nullopt;
        }
        return geometry::BoxSpec{{values[2], values[3]}, values[1], values[0]};
    }

    void start(const std::string& name, const XML_Char** attrs) {
        const std::string parent = stack.empty() ? std::string() : stack.back();
        stack.push_back(name);
        text.clear();
        if (name == "dataset") {
            in_dataset = true;
            if (const char* n = find_attr(attrs, "name")) dataset_name = n;
        } else if (name == "frame") {
            const char* raw = find_attr(attrs, "number");
            if (!raw) return fail("frame element is missing attribute 'number'");
            auto n = to_integer(raw);
            if (!n || *n < 0) return fail(std::string("frame number is not a non-negative integer: '") + raw + "'");
            if (last_frame && *n <= *last_frame) {
                return fail("frame " + std::to_string(*n) + " is out of order or duplicated");
            }
            frame.emplace();
            frame->number = *n;
            object_ids.clear();
        } else if (name == "object" && frame && parent == "objectlist") {
            const char* raw = find_attr(attrs, "id");
            if (!raw) return fail(where() + ": object is missing attribute 'id'");
            auto id = to_integer(raw);
            if (!id || *id < 0) return fail(where() + ": object id is not a non-negative integer: '" + raw + "'");
            if (!object_ids.insert(*id).second) {
                return fail(where() + ": object id " + std::to_string(*id) + " appears twice");
            }
            object.emplace();
            object->id = *id;
            object_has_box = false;
        } else if (name == "group" && frame) {
            group.emplace();
            if (const char* raw = find_attr(attrs, "id")) {
                auto id = to_integer(raw);
                if (!id) return fail(where() + ": group id is not an integer: '" + raw + "'");
                group->id = *id;
            }
        } else if (name == "box") {
            if (object && !group) {
                if (auto b = read_box(attrs)) {
                    object->box = *b;
                    object_has_box = true;
                }
            } else if (group) {
                if (auto b = read_box(attrs)) group->box = *b;
            }
        } else if (name == "hypothesis" && (object || group)) {
            hypothesis.emplace();
        }
    }

    void end(const std::string& name) {
        const std::string content(trim(text));
        text.clear();
        if (!stack.empty()) stack.pop_back();

        if (name == "orientation" && (object || group)) {
            auto v = content.empty() ? std::optional<double>(0.0) : to_number(content);
            if (!v) return fail(where() + ": orientation is not numeric: '" + content + "'");
            (group ? group->orientation : object->orientation) = *v;
        } else if (name == "appearance" && (object || group)) {
            (group ? group->appearance : object->appearance) = content;
        } else if (hypothesis && (name == "role" || name == "movement" || name == "context" || name == "situation")) {
            if (name == "role") hypothesis->role = content;
            if (name == "movement") hypothesis->movement = content;
            if (name == "context") hypothesis->context = content;
            if (name == "situation") hypothesis->situation = content;
        } else if (name == "hypothesis" && hypothesis) {
            (group ? group->hypotheses : object->hypotheses).push_back(std::move(*hypothesis));
            hypothesis.reset();
        } else if (name == "members" && group) {
            std::string_view rest = content;
            while (!rest.empty()) {
                auto comma = rest.find(',');
                auto piece = trim(rest.substr(0, comma));
                if (!piece.empty()) {
                    auto m = to_integer(piece);
                    if (!m) return fail(where() + ": group member is not an integer: '" + std::string(piece) + "'");
                    group->members.push_back(*m);
                }
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        } else if (name == "object" && object) {
            if (!object_has_box) return fail(where() + ": object has no box");
            frame->objects.push_back(std::move(*object));
            object.reset();
        } else if (name == "group" && group) {
            frame->groups.push_back(std::move(*group));
            group.reset();
        } else if (name == "frame" && frame) {
            last_frame = frame->number;
            Frame done = std::move(*frame);
            frame.reset();
            on_frame(std::move(done));
        } else if (name == "dataset") {
            complete = true;
        }
    }
};

namespace {

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto* s = static_cast<StreamParser::State*>(data);
    if (!s->error.empty()) return;
    try {
        s->start(name, attrs);
    } catch (const std::exception& e) {
        s->fail(e.what());
    }
}

void XMLCALL on_end(void* data, const XML_Char* name) {
    auto* s = static_cast<StreamParser::State*>(data);
    if (!s->error.empty()) return;
    try {
        s->end(name);
    } catch (const std::exception& e) {
        s->fail(e.what());
    }
}

void XMLCALL on_text(void* data, const XML_Char* text, int len) {
    auto* s = static_cast<StreamParser::State*>(data);
    s->text.append(text, static_cast<std::size_t>(len));
}

}  // namespace

StreamParser::StreamParser(FrameCallback on_frame) : state_(std::make_unique<State>()) {
    state_->on_frame = std::move(on_frame);
    parser_ = XML_ParserCreate(nullptr);
    if (!parser_) throw Error(ErrorCode::io_error, "cannot allocate XML parser");
    state_->parser = parser_;
    XML_SetUserData(parser_, state_.get());
    XML_SetElementHandler(parser_, on_start, on_end);
    XML_SetCharacterDataHandler(parser_, on_text);
}

StreamParser::~StreamParser() {
    if (parser_) XML_ParserFree(parser_);
}

void StreamParser::check() {
    if (!state_->error.empty()) throw Error(ErrorCode::parse_error, "CVML: " + state_->error);
}

void StreamParser::feed(std::string_view chunk) {
    check();
    if (XML_Parse(parser_, chunk.data(), static_cast<int>(chunk.size()), XML_FALSE) == XML_STATUS_ERROR) {
        check();
        throw Error(ErrorCode::parse_error,
                    std::string("malformed XML at line ") + std::to_string(XML_GetCurrentLineNumber(parser_)) +
                        ": " + XML_ErrorString(XML_GetErrorCode(parser_)));
    }
    check();
}

void StreamParser::finish() {
    check();
    if (XML_Parse(parser_, "", 0, XML_TRUE) == XML_STATUS_ERROR) {
        check();
        throw Error(ErrorCode::parse_error,
                    std::string("malformed XML at line ") + std::to_string(XML_GetCurrentLineNumber(parser_)) +
                        ": " + XML_ErrorString(XML_GetErrorCode(parser_)));
    }
    check();
    if (!state_->in_dataset) throw Error(ErrorCode::parse_error, "CVML: document has no <dataset> element");
}

const std::string& StreamParser::dataset_name() const noexcept { return state_->dataset_name; }
bool StreamParser::complete() const noexcept { return state_->complete; }

// -- whole documents ---------------------------------------------------------------

Dataset parse_cvml(std::string_view document) {
    Dataset ds;
    StreamParser parser([&](Frame f) { ds.frames.push_back(std::move(f)); });
    parser.feed(document);
    parser.finish();
    ds.name = parser.dataset_name();
    return ds;
}

Dataset load_cvml(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open CVML file " + path.string());
    Dataset ds;
    StreamParser parser([&](Frame f) { ds.frames.push_back(std::move(f)); });
    std::string buf(1 << 16, '\0');
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        parser.feed(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
    }
    parser.finish();
    ds.name = parser.dataset_name();
    return ds;
}

const Frame* frame_data(const Dataset& dataset, FrameNum number) {
    auto it = std::lower_bound(dataset.frames.begin(), dataset.frames.end(), number,
                               [](const Frame& f, FrameNum n) { return f.number < n; });
    if (it == dataset.frames.end() || it->number != number) return nullptr;
    return &*it;
}

// -- fact assertion -------------------------------------------------------------------

void process_frame(const Frame* frame, FrameNum number, FactStore& store, const IngestConfig& cfg) {
    if (store.high_water() && number <= *store.high_water()) {
        throw Error(ErrorCode::duplicate, "frame " + std::to_string(number) + " was already processed");
    }
    if (frame) {
        for (const auto& obj : frame->objects) {
            const auto rect = geometry::rect_from_box(obj.box);
            store.assert_entity_facts(
                {EntityId(obj.id), number, entity_type(obj, cfg.mapping), rect, obj.box.center, obj.orientation});
        }
        spatial::entail_frame(store, number, cfg.functors, cfg.spatial);
    }
    store.set_high_water(number);
}

void process_frame(const Dataset& dataset, FrameNum number, FactStore& store, const IngestConfig& cfg) {
    process_frame(frame_data(dataset, number), number, store, cfg);
}

void ingest(const Dataset& dataset, FactStore& store, const IngestConfig& cfg) {
    for (const auto& f : dataset.frames) process_frame(&f, f.number, store, cfg);
}

}  // namespace versa::cvml
