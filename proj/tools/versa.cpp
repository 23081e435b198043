#include "versa/cvml.hpp"
#include "versa/error.hpp"
#include "versa/events.hpp"
#include "versa/monitor.hpp"
#include "versa/service.hpp"
#include "versa/snapshot.hpp"
#include "versa/template_io.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

using namespace versa;

namespace {

struct Common {
    std::string input;
    std::string kb;
    std::string type_map;
    std::vector<std::string> statics;
    double near_threshold = 50.0;
    bool entailed = false;
};

StaticEntity parse_static(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::invalid_argument, "--static expects id=xc,yc,w,h[,orient]");
    std::vector<double> v;
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string part; std::getline(ss, part, ',');) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument, "--static value '" + part + "' is not a number");
        }
    }
    if (v.size() != 4 && v.size() != 5) throw Error(ErrorCode::invalid_argument, "--static expects id=xc,yc,w,h[,orient]");
    const geometry::BoxSpec box{{v[0], v[1]}, v[2], v[3]};
    return {EntityId(spec.substr(0, eq)), geometry::rect_from_box(box), box.center, v.size() == 5 ? v[4] : 0.0};
}

cvml::IngestConfig ingest_config(const Common& c) {
    cvml::IngestConfig cfg;
    cfg.spatial.near_threshold = c.near_threshold;
    validate(cfg.spatial);
    if (!c.type_map.empty()) cfg.mapping = cvml::TypeMapping::load(c.type_map);
    return cfg;
}

MatchOptions match_options(const Common& c) {
    return {c.entailed ? spatial::RelationSource::entailed : spatial::RelationSource::cached,
            SpatialConfig{c.near_threshold}};
}

void add_statics(FactStore& store, const Common& c) {
    for (const auto& s : c.statics) {
        const auto st = parse_static(s);
        store.assert_static_entity(st.id, geometry::box_from_rect(st.bounds), st.orient);
    }
}

// Builds the store from a snapshot (--kb) or by ingesting a CVML file.
FactStore load_store(const Common& c, cvml::Dataset* dataset_out = nullptr) {
    if (!c.kb.empty()) {
        auto store = read_snapshot(c.kb);
        add_statics(store, c);
        return store;
    }
    if (c.input.empty()) throw Error(ErrorCode::invalid_argument, "give a CVML file or --kb snapshot");
    auto dataset = cvml::load_cvml(c.input);
    FactStore store;
    add_statics(store, c);
    cvml::ingest(dataset, store, ingest_config(c));
    if (dataset_out) *dataset_out = std::move(dataset);
    return store;
}

void add_common(CLI::App* cmd, Common& c, bool needs_input = true) {
    auto* in = cmd->add_option("input", c.input, "CVML annotation file");
    if (!needs_input) in->required(false);
    cmd->add_option("--kb", c.kb, "load a store snapshot instead of parsing CVML")->check(CLI::ExistingFile);
    cmd->add_option("--type-map", c.type_map, "role = person|object mapping file")->check(CLI::ExistingFile);
    cmd->add_option("--static", c.statics, "static region id=xc,yc,w,h[,orient]");
    cmd->add_option("--near-threshold", c.near_threshold, "distance below which entities are near")
        ->envname("VERSA_NEAR_THRESHOLD")
        ->check(CLI::PositiveNumber);
}

int run_parse(const Common& c, const std::string& snapshot_out) {
    cvml::Dataset dataset;
    const auto store = load_store(c, &dataset);
    std::set<EntityId> ids;
    for (FrameNum f : store.populated_frames()) {
        for (auto& id : store.entities_in_frame(f)) ids.insert(id);
    }
    const auto frames = c.kb.empty() ? dataset.frames.size()
                                     : (store.frame_range() ? store.frame_range()->second - store.frame_range()->first + 1 : 0);
    std::cout << frames << " frames, " << ids.size() << " entities, " << store.basic_fact_count() << " basic facts\n";
    if (!snapshot_out.empty()) write_snapshot(store, snapshot_out);
    return 0;
}

int run_relations(const Common& c, FrameNum frame, const std::string& relation) {
    const auto store = load_store(c);
    store.require_processed(frame);
    std::vector<SpatialRelation> rels;
    if (relation.empty()) {
        rels = store.cached_functors();
    } else {
        rels.push_back(parse_relation_ref(relation).relation);
    }
    const SpatialConfig cfg{c.near_threshold};
    for (auto r : rels) {
        for (const auto& f : store.query_cached({r, false}, std::nullopt, std::nullopt, frame, &cfg)) {
            std::cout << to_string(r) << "_kb(" << f.e1 << "," << f.e2 << "," << f.frame << ")\n";
        }
    }
    return 0;
}

int run_match(const Common& c, const std::string& path, std::optional<double> threshold, const std::string& output) {
    auto doc = load_frame_template(path);
    if (threshold) doc.threshold = *threshold;
    const auto store = load_store(c);
    const auto opts = match_options(c);
    if (output == "frames") {
        for (const auto& m : match(store, doc.tmpl, doc.threshold, opts)) {
            std::cout << m.frame << " " << format_bindings(doc.tmpl, m.bindings) << " " << m.score << "\n";
        }
    } else if (output == "iset") {
        std::cout << format(iset_match(store, doc.tmpl, doc.threshold, opts)) << "\n";
    } else {
        for (const auto& g : iset_match_bindings(store, doc.tmpl, doc.threshold, opts)) {
            std::cout << format_bindings(doc.tmpl, g.bindings) << "-" << format(g.iset) << "\n";
        }
    }
    return 0;
}

EventTemplateDoc resolve_event(const std::string& event) {
    if (event == "left_item") return {left_item_template(), SearchMode::first};
    return load_event_template(event);
}

int run_detect(const Common& c, const std::string& event, const std::string& area, FrameNum duration,
               FrameNum radius, const std::string& mode, std::optional<FrameNum> cursor) {
    const auto store = load_store(c);
    if (event == "loitering" || event == "loitering_in") {
        if (area.empty()) throw Error(ErrorCode::invalid_argument, "loitering needs --area");
        for (const auto& l : loitering_in(store, EntityId(area), duration, radius, match_options(c))) {
            std::cout << "loitering_in ID=" << l.id << " start=" << l.start << " end=" << l.end << "\n";
        }
        return 0;
    }
    const auto doc = resolve_event(event);
    EvalOptions opts;
    opts.mode = mode.empty() ? doc.mode : (mode == "first" ? SearchMode::first : SearchMode::all);
    opts.cursor = cursor;
    opts.match = match_options(c);
    for (const auto& d : evaluate_event(store, doc.event, opts)) std::cout << format(d) << "\n";
    return 0;
}

std::atomic<bool> g_stop{false};

int run_monitor(const Common& c, const std::string& event, MonitorConfig mcfg, bool follow) {
    mcfg.match = match_options(c);
    mcfg.actions.console = true;
    Monitor monitor(mcfg, &std::cout);
    auto handle = std::make_shared<StoreHandle>();
    handle->write([&](FactStore& s) { add_statics(s, c); });
    auto doc = resolve_event(event);
    monitor.add_template(doc.event, c.input, handle);

    const auto cfg = ingest_config(c);
    cvml::StreamParser parser([&](cvml::Frame frame) {
        handle->write([&](FactStore& s) { cvml::process_frame(&frame, frame.number, s, cfg); });
    });
    std::ifstream in;
    std::istream* src = &std::cin;
    if (c.input != "-") {
        in.open(c.input, std::ios::binary);
        if (!in) throw Error(ErrorCode::io_error, "cannot open " + c.input);
        src = &in;
    }
    std::signal(SIGINT, [](int) { g_stop = true; });
    auto last_tick = std::chrono::steady_clock::now();
    std::vector<char> buf(1 << 16);
    while (!g_stop) {
        src->read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = src->gcount();
        if (got > 0) parser.feed({buf.data(), static_cast<std::size_t>(got)});
        const auto now = std::chrono::steady_clock::now();
        if (now - last_tick >= mcfg.period) {
            monitor.tick();
            last_tick = now;
        }
        if (got > 0) continue;
        if (parser.complete() || !follow) break;
        src->clear();
        std::this_thread::sleep_for(mcfg.period);
    }
    if (!g_stop) parser.finish();
    monitor.tick();
    return 0;
}

int run_serve(const Common& c, const std::string& host, int port, const std::string& static_dir,
              MonitorConfig mcfg) {
    ServiceOptions opts;
    opts.ingest = ingest_config(c);
    mcfg.match = match_options(c);
    opts.monitor = mcfg;
    if (!static_dir.empty()) opts.static_dir = static_dir;
    Service service(opts);
    if (!c.input.empty()) {
        auto dataset = cvml::load_cvml(c.input);
        std::vector<StaticEntity> statics;
        for (const auto& s : c.statics) statics.push_back(parse_static(s));
        std::cout << "loaded " << c.input << " as " << service.add_dataset(dataset, statics, opts.ingest.mapping) << "\n";
    }
    const int bound = service.bind(host, port);
    std::cout << "listening on " << host << ":" << bound << std::endl;
    service.listen_after_bind();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"versa: event recognition over CVML annotation streams"};
    app.require_subcommand(1);

    Common common;

    auto* parse = app.add_subcommand("parse", "ingest a CVML file and print a summary");
    std::string snapshot_out;
    add_common(parse, common, false);
    parse->add_option("--snapshot", snapshot_out, "write the resulting store snapshot here");

    auto* relations = app.add_subcommand("relations", "print cached relation facts for a frame");
    add_common(relations, common, false);
    FrameNum frame = 0;
    std::string relation;
    relations->add_option("--frame", frame, "frame number")->required();
    relations->add_option("--relation", relation, "only this relation");

    auto* match_cmd = app.add_subcommand("match", "run a frame template");
    add_common(match_cmd, common, false);
    std::string template_path;
    std::optional<double> threshold;
    std::string output = "iset";
    match_cmd->add_option("--template", template_path, "frame template file")->required()->check(CLI::ExistingFile);
    match_cmd->add_option("--threshold", threshold, "match score threshold")->check(CLI::Range(0.0, 1.0));
    match_cmd->add_option("--output", output, "frames | iset | bindings")
        ->check(CLI::IsMember({"frames", "iset", "bindings"}));
    match_cmd->add_flag("--entailed", common.entailed, "recompute relations instead of using the cache");

    auto* detect = app.add_subcommand("detect", "run an event template");
    add_common(detect, common, false);
    std::string event = "left_item";
    std::string area;
    FrameNum duration = 500;
    FrameNum radius = 1;
    std::string mode;
    std::optional<FrameNum> cursor;
    detect->add_option("--event", event, "left_item, loitering or an event template file");
    detect->add_option("--area", area, "static region for loitering");
    detect->add_option("--duration", duration, "loitering duration in frames")->check(CLI::PositiveNumber);
    detect->add_option("--radius", radius, "smoothing radius")->check(CLI::NonNegativeNumber);
    detect->add_option("--mode", mode, "first | all")->check(CLI::IsMember({"first", "all"}));
    detect->add_option("--cursor", cursor, "only anchors after this frame");
    detect->add_flag("--entailed", common.entailed, "recompute relations instead of using the cache");

    MonitorConfig mcfg;
    int period_ms = 1000;
    std::string log_path;
    std::string webhook;
    auto add_monitor_opts = [&](CLI::App* cmd) {
        cmd->add_option("--period", period_ms, "poll period in milliseconds")->check(CLI::PositiveNumber);
        cmd->add_option("--log", log_path, "append detections to this NDJSON file");
        cmd->add_option("--webhook", webhook, "POST detections to this http:// URL");
    };

    auto* monitor = app.add_subcommand("monitor", "watch a CVML stream and fire detections");
    add_common(monitor, common);
    bool follow = false;
    monitor->add_option("--event", event, "left_item or an event template file");
    monitor->add_flag("--follow", follow, "keep reading until the document is complete");
    add_monitor_opts(monitor);

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    add_common(serve, common, false);
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (0 picks one)")->check(CLI::Range(0, 65535));
    serve->add_option("--static-dir", static_dir, "serve frame images under /assets")->check(CLI::ExistingDirectory);
    add_monitor_opts(serve);

    CLI11_PARSE(app, argc, argv);

    try {
        mcfg.period = std::chrono::milliseconds(period_ms);
        if (!log_path.empty()) mcfg.actions.log_path = log_path;
        if (!webhook.empty()) mcfg.actions.webhook_url = webhook;
        if (*parse) return run_parse(common, snapshot_out);
        if (*relations) return run_relations(common, frame, relation);
        if (*match_cmd) return run_match(common, template_path, threshold, output);
        if (*detect) return run_detect(common, event, area, duration, radius, mode, cursor);
        if (*monitor) return run_monitor(common, event, mcfg, follow);
        if (*serve) return run_serve(common, host, port, static_dir, mcfg);
    } catch (const Error& e) {
        std::cerr << "versa: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "versa: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
