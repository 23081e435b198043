#include "versa/service.hpp"

#include "versa/error.hpp"
#include "versa/sketch.hpp"
#include "versa/template_io.hpp"

#include <json.hpp>

namespace versa {

using nlohmann::json;

namespace {

struct HttpError : std::runtime_error {
    HttpError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status(status), code(std::move(code)) {}
    int status;
    std::string code;
};

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::unknown_entity:
        case ErrorCode::not_processed: return 404;
        case ErrorCode::duplicate:
        case ErrorCode::stale_cache: return 409;
        case ErrorCode::io_error: return 500;
        default: return 400;
    }
}

void reply(httplib::Response& res, int status, json body) {
    body["version"] = kApiVersion;
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    reply(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw HttpError(400, "parse_error", std::string("request body is not valid JSON: ") + e.what());
    }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const HttpError& e) {
            reply_error(res, e.status, e.code, e.what());
        } catch (const Error& e) {
            reply_error(res, status_for(e.code()), std::string(to_string(e.code())), e.what());
        } catch (const json::exception& e) {
            reply_error(res, 400, "invalid_argument", e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "internal", e.what());
        }
    };
}

json box_json(const geometry::Rect& r) {
    const auto b = geometry::box_from_rect(r);
    return {{"xc", b.center.x}, {"yc", b.center.y}, {"w", b.width}, {"h", b.height}};
}

geometry::BoxSpec box_from_json(const json& j) {
    return {{j.at("xc").get<double>(), j.at("yc").get<double>()}, j.at("w").get<double>(), j.at("h").get<double>()};
}

json entity_json(const EntityView& e) {
    return {{"id", e.id.str()},
            {"type", std::string(to_string(e.type))},
            {"box", box_json(e.bounds)},
            {"bounds", {e.bounds.min_x, e.bounds.min_y, e.bounds.max_x, e.bounds.max_y}},
            {"orient", e.orient}};
}

FrameNum parse_frame_number(const std::string& text) {
    try {
        std::size_t used = 0;
        const auto n = std::stoll(text, &used);
        if (used == text.size()) return n;
    } catch (const std::exception&) {
    }
    throw HttpError(400, "invalid_argument", "frame number '" + text + "' is not an integer");
}

EventTemplateDoc event_from_request(const json& body) {
    if (!body.contains("event")) throw HttpError(400, "invalid_argument", "request lacks 'event'");
    const auto& ev = body.at("event");
    if (ev.is_string()) {
        if (ev.get<std::string>() == "left_item") return {left_item_template(), SearchMode::all};
        throw HttpError(400, "invalid_argument", "unknown built-in event '" + ev.get<std::string>() + "'");
    }
    return event_template_from_json(ev);
}

}  // namespace

Service::Service(ServiceOptions opts) : opts_(std::move(opts)), monitor_(opts_.monitor) {
    routes();
    if (opts_.monitor_thread) {
        monitor_thread_ = std::jthread([this](std::stop_token st) { monitor_.run(st); });
    }
}

Service::~Service() {
    stop();
    if (monitor_thread_.joinable()) {
        monitor_thread_.request_stop();
        monitor_thread_.join();
    }
}

int Service::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::io_error, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void Service::listen_after_bind() { server_.listen_after_bind(); }

void Service::stop() { server_.stop(); }

std::string Service::add_dataset(const cvml::Dataset& dataset, const std::vector<StaticEntity>& statics,
                                 const cvml::TypeMapping& mapping) {
    auto handle = std::make_shared<StoreHandle>();
    handle->write([&](FactStore& store) {
        for (const auto& s : statics) store.assert_static_entity(s.id, geometry::box_from_rect(s.bounds), s.orient);
    });
    std::string id;
    {
        std::lock_guard lock(datasets_mutex_);
        id = "ds" + std::to_string(next_dataset_++);
        datasets_.emplace(id, DatasetEntry{dataset.name, handle});
    }
    auto cfg = opts_.ingest;
    cfg.mapping = mapping;
    for (const auto& frame : dataset.frames) {
        handle->write([&](FactStore& store) { cvml::process_frame(&frame, frame.number, store, cfg); });
    }
    return id;
}

std::shared_ptr<StoreHandle> Service::dataset_store(const std::string& id) const {
    std::lock_guard lock(datasets_mutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw HttpError(404, "unknown_dataset", "no dataset '" + id + "'");
    return it->second.store;
}

void Service::routes() {
    server_.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
                    reply(res, 200, {{"status", "ok"}});
                }));

    server_.Post("/datasets", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     std::string document;
                     std::vector<StaticEntity> statics;
                     auto mapping = opts_.ingest.mapping;
                     const auto type = req.get_header_value("Content-Type");
                     if (type.find("json") != std::string::npos) {
                         const auto body = parse_body(req);
                         document = body.at("cvml").get<std::string>();
                         if (body.contains("type_map")) {
                             mapping = cvml::TypeMapping::from_text(body.at("type_map").get<std::string>(), mapping);
                         }
                         for (const auto& s : body.value("statics", json::array())) {
                             const auto box = box_from_json(s);
                             statics.push_back({EntityId(s.at("id").get<std::string>()), geometry::rect_from_box(box),
                                                box.center, s.value("orient", 0.0)});
                         }
                     } else {
                         document = req.body;
                     }
                     const auto dataset = cvml::parse_cvml(document);
                     const auto id = add_dataset(dataset, statics, mapping);
                     const auto snap = dataset_store(id)->snapshot();
                     json body{{"id", id}, {"name", dataset.name}, {"frames", dataset.frames.size()}};
                     if (auto r = snap->frame_range()) body["range"] = {r->first, r->second};
                     reply(res, 201, body);
                 }));

    server_.Get(R"(/datasets/([^/]+)/range)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto snap = dataset_store(req.matches[1])->snapshot();
                    json body{{"dataset", req.matches[1]}};
                    if (auto r = snap->frame_range()) {
                        body["low"] = r->first;
                        body["high_water"] = r->second;
                    } else {
                        body["low"] = nullptr;
                        body["high_water"] = nullptr;
                    }
                    reply(res, 200, body);
                }));

    server_.Get(R"(/datasets/([^/]+)/frames/(-?\d+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto snap = dataset_store(req.matches[1])->snapshot();
                    const auto frame = parse_frame_number(req.matches[2]);
                    snap->require_processed(frame);
                    json entities = json::array();
                    for (const auto& e : snap->frame_entities(frame)) entities.push_back(entity_json(e));
                    json statics = json::array();
                    for (const auto& [id, s] : snap->statics()) {
                        statics.push_back(entity_json({id, EntityType::static_region, s.bounds, s.loc, s.orient}));
                    }
                    reply(res, 200,
                          {{"dataset", req.matches[1]}, {"frame", frame}, {"entities", entities}, {"statics", statics}});
                }));

    server_.Post("/templates/frame", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const auto body = parse_body(req);
                     Sketch sketch;
                     sketch.id = body.value("id", "f1");
                     for (const auto& e : body.at("entities")) {
                         sketch.entities.push_back({e.at("id").get<std::string>(),
                                                    parse_entity_type(e.at("type").get<std::string>()),
                                                    box_from_json(e.at("box")), e.value("orient", 0.0)});
                     }
                     for (const auto& n : body.value("not_exists", json::array())) {
                         if (n.is_string()) {
                             sketch.not_exists.emplace_back(n.get<std::string>(), EntityType::object);
                         } else {
                             sketch.not_exists.emplace_back(n.at("id").get<std::string>(),
                                                            parse_entity_type(n.value("type", "object")));
                         }
                     }
                     auto spatial = opts_.ingest.spatial;
                     if (body.contains("near_threshold")) spatial.near_threshold = body.at("near_threshold").get<double>();
                     const auto tmpl = sketch_to_frame_template(sketch, spatial, opts_.ingest.functors);
                     const double threshold = body.value("threshold", 1.0);
                     validate_threshold(threshold);
                     reply(res, 200, {{"template", to_json(tmpl, threshold)}, {"text", format(tmpl)}});
                 }));

    server_.Post("/templates/event", guarded([](const httplib::Request& req, httplib::Response& res) {
                     auto body = parse_body(req);
                     std::vector<TimelineBar> bars;
                     for (const auto& b : body.value("bars", json::array())) {
                         bars.push_back({b.at("step").get<std::string>(), b.at("x0").get<double>(),
                                         b.at("x1").get<double>()});
                     }
                     json doc = body;
                     doc.erase("bars");
                     if (!doc.contains("constraints")) doc["constraints"] = json::array();
                     const auto derived = derive_temporal_constraints(bars);
                     for (const auto& c : derived) doc["constraints"].push_back(c.relation + "(" + c.first + "," + c.second + ")");
                     const auto ev = event_template_from_json(doc);
                     json out{{"template", to_json(ev.event, ev.mode)}};
                     out["derived"] = json::array();
                     for (const auto& c : derived) out["derived"].push_back(format(c));
                     reply(res, 200, out);
                 }));

    server_.Post("/detect", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const auto body = parse_body(req);
                     const auto snap = dataset_store(body.at("dataset").get<std::string>())->snapshot();
                     json detections = json::array();
                     if (body.contains("loitering")) {
                         const auto& l = body.at("loitering");
                         for (const auto& hit : loitering_in(*snap, EntityId(l.at("area").get<std::string>()),
                                                             l.at("duration").get<FrameNum>(), l.value("radius", 1),
                                                             {spatial::RelationSource::cached, opts_.ingest.spatial})) {
                             detections.push_back({{"event", "loitering_in"},
                                                   {"bindings", {{"ID", hit.id.str()}}},
                                                   {"steps", json::array({{{"step", "loiter"},
                                                                           {"begin", hit.start},
                                                                           {"end", hit.end}}})},
                                                   {"detected_at", hit.end}});
                         }
                         reply(res, 200, {{"detections", detections}});
                         return;
                     }
                     const auto ev = event_from_request(body);
                     EvalOptions opts;
                     opts.mode = ev.mode;
                     if (body.contains("mode")) {
                         const auto m = body.at("mode").get<std::string>();
                         if (m != "first" && m != "all") throw HttpError(400, "invalid_argument", "mode must be first or all");
                         opts.mode = m == "first" ? SearchMode::first : SearchMode::all;
                     }
                     if (body.contains("cursor") && !body.at("cursor").is_null()) opts.cursor = body.at("cursor").get<FrameNum>();
                     opts.match.spatial = opts_.ingest.spatial;
                     for (const auto& d : evaluate_event(*snap, ev.event, opts)) detections.push_back(to_json(d));
                     reply(res, 200, {{"detections", detections}});
                 }));

    server_.Post("/monitor/templates", guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const auto body = parse_body(req);
                     const auto dataset = body.at("dataset").get<std::string>();
                     auto store = dataset_store(dataset);
                     auto ev = event_from_request(body);
                     if (body.contains("id")) ev.event.id = body.at("id").get<std::string>();
                     const auto id = ev.event.id;
                     monitor_.add_template(std::move(ev.event), dataset, std::move(store));
                     reply(res, 201, {{"id", id}, {"dataset", dataset}});
                 }));

    server_.Delete(R"(/monitor/templates/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       if (!monitor_.remove_template(req.matches[1])) {
                           throw HttpError(404, "unknown_template", "no monitored template '" + std::string(req.matches[1]) + "'");
                       }
                       reply(res, 200, {{"removed", req.matches[1]}});
                   }));

    server_.Get("/monitor/templates", guarded([this](const httplib::Request&, httplib::Response& res) {
                    reply(res, 200, {{"templates", monitor_.template_ids()}});
                }));

    server_.Get("/monitor/detections", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    std::uint64_t since = 0;
                    if (req.has_param("since")) {
                        const auto text = req.get_param_value("since");
                        try {
                            std::size_t used = 0;
                            since = std::stoull(text, &used);
                            if (used != text.size()) throw std::invalid_argument("trailing");
                        } catch (const std::exception&) {
                            throw HttpError(400, "invalid_argument", "since must be a sequence number");
                        }
                    }
                    json records = json::array();
                    std::uint64_t last = since;
                    for (const auto& r : monitor_.detections_since(since)) {
                        records.push_back(to_json(r));
                        last = std::max(last, r.seq);
                    }
                    reply(res, 200, {{"detections", records}, {"last", last}});
                }));

    if (opts_.static_dir) server_.set_mount_point("/assets", opts_.static_dir->string());
}

}  // namespace versa
