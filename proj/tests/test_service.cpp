#include "support/corpus.hpp"

#include "leftbag.hpp"

#include "versa/service.hpp"
#include "versa/template_io.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace versa;
using nlohmann::json;

namespace {

struct Running {
    Service service;
    int port = 0;
    std::thread thread;

    explicit Running(ServiceOptions opts) : service(std::move(opts)) {
        port = service.bind("127.0.0.1", 0);
        thread = std::thread([this] { service.listen_after_bind(); });
    }
    ~Running() {
        service.stop();
        thread.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(std::chrono::seconds(10));
        return c;
    }
};

ServiceOptions quiet() {
    ServiceOptions o;
    o.monitor_thread = false;
    return o;
}

json body_of(const httplib::Result& r) {
    REQUIRE(r);
    return json::parse(r->body);
}

json post(httplib::Client& c, const std::string& path, const json& body, int want) {
    auto r = c.Post(path, body.dump(), "application/json");
    REQUIRE(r);
    INFO(r->body);
    CHECK(r->status == want);
    return json::parse(r->body);
}

std::string upload(httplib::Client& c, const std::string& xml, json statics = json::array()) {
    return post(c, "/datasets", {{"cvml", xml}, {"statics", statics}}, 201).at("id").get<std::string>();
}

}  // namespace

TEST_CASE("health and error bodies") {
    Running s(quiet());
    auto c = s.client();
    auto health = body_of(c.Get("/health"));
    CHECK(health["status"] == "ok");
    CHECK(health["version"] == 1);

    auto missing = c.Get("/datasets/nope/range");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto err = json::parse(missing->body);
    CHECK(err["version"] == 1);
    CHECK(err["error"]["code"] == "unknown_dataset");

    auto garbage = c.Post("/detect", "{not json", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);
    CHECK(json::parse(garbage->body)["error"]["code"] == "parse_error");

    auto bad_xml = c.Post("/datasets", "<dataset><frame number=\"x\"></dataset>", "application/xml");
    REQUIRE(bad_xml);
    CHECK(bad_xml->status == 400);
}

TEST_CASE("uploading the annotation fixture") {
    Running s(quiet());
    auto c = s.client();
    auto r = c.Post("/datasets", std::string(fixtures::leftbag), "application/xml");
    REQUIRE(r);
    CHECK(r->status == 201);
    const auto created = json::parse(r->body);
    CHECK(created["name"] == "LeftBag");
    CHECK(created["frames"] == 2);
    const auto id = created["id"].get<std::string>();

    const auto range = body_of(c.Get(("/datasets/" + id + "/range").c_str()));
    CHECK(range["low"] == 0);
    CHECK(range["high_water"] == 1);

    for (int f : {0, 1}) {
        const auto frame = body_of(c.Get(("/datasets/" + id + "/frames/" + std::to_string(f)).c_str()));
        REQUIRE(frame["entities"].size() == 3);
        CHECK(frame["entities"][0]["type"] == "person");
        CHECK(frame["statics"].empty());
    }
    const auto f0 = body_of(c.Get(("/datasets/" + id + "/frames/0").c_str()));
    CHECK(f0["entities"][0]["box"]["xc"] == 184);
    CHECK(f0["entities"][0]["orient"] == 165);

    auto beyond = c.Get(("/datasets/" + id + "/frames/7").c_str());
    REQUIRE(beyond);
    CHECK(beyond->status == 404);
}

TEST_CASE("sketching templates") {
    Running s(quiet());
    auto c = s.client();
    const json sketch = {{"id", "f1"},
                         {"entities",
                          {{{"id", "P0"}, {"type", "person"}, {"box", {{"xc", 100}, {"yc", 100}, {"w", 20}, {"h", 40}}}},
                           {{"id", "O1"}, {"type", "object"}, {"box", {{"xc", 130}, {"yc", 100}, {"w", 10}, {"h", 10}}}}}},
                         {"not_exists", {{{"id", "O2"}, {"type", "object"}}}},
                         {"threshold", 0.85}};
    const auto out = post(c, "/templates/frame", sketch, 200);
    const auto text = out["text"].get<std::string>();
    CHECK(text.find("near_kb(O1,P0)") != std::string::npos);
    CHECK(text.find("moreLeft_kb(P0,O1)") != std::string::npos);
    CHECK(out["template"]["not_exists"] == json::array({"O2"}));
    for (const auto& r : out["template"]["relations"]) CHECK(r.get<std::string>().find("O2") == std::string::npos);
    const auto doc = frame_template_from_json(out["template"]);
    CHECK(doc.threshold == doctest::Approx(0.85));

    auto bad = sketch;
    bad["threshold"] = 1.5;
    post(c, "/templates/frame", bad, 400);

    const json steps = json::parse(R"([
        {"id": "0", "mode": "instant", "template": {"version": 1, "id": "a", "type_list": ["person:P"], "relations": [], "not_exists": []}},
        {"id": "1", "mode": "instant", "template": {"version": 1, "id": "b", "type_list": ["person:P"], "relations": [], "not_exists": []}},
        {"id": "2", "mode": "instant", "template": {"version": 1, "id": "c", "type_list": ["person:P"], "relations": [], "not_exists": []}}
    ])");
    const json timeline = {{"version", 1},
                           {"id", "walk"},
                           {"steps", steps},
                           {"bars",
                            {{{"step", "0"}, {"x0", 100}, {"x1", 200}},
                             {{"step", "1"}, {"x0", 0}, {"x1", 80}},
                             {{"step", "2"}, {"x0", 230}, {"x1", 300}}}}};
    const auto ev = post(c, "/templates/event", timeline, 200);
    const auto derived = ev["derived"];
    CHECK(std::find(derived.begin(), derived.end(), "int_before(1, 0)") != derived.end());
    CHECK(std::find(derived.begin(), derived.end(), "int_before(0, 2)") != derived.end());
    CHECK(event_template_from_json(ev["template"]).event.constraints.size() == 3);
}

TEST_CASE("detection requests") {
    Running s(quiet());
    auto c = s.client();
    const auto drop = upload(c, corpus::to_xml(corpus::drop_scenario(), "Drop"));
    const auto first = post(c, "/detect", {{"dataset", drop}, {"event", "left_item"}, {"mode", "first"}}, 200);
    REQUIRE(first["detections"].size() == 1);
    const auto d = detection_from_json(first["detections"][0]);
    CHECK(format(d) == "left_item O=2 P=1 anchor=100 prior=0 after=140");

    const auto all = post(c, "/detect", {{"dataset", drop}, {"event", "left_item"}}, 200);
    CHECK(all["detections"].size() == 40);
    const auto later = post(c, "/detect", {{"dataset", drop}, {"event", "left_item"}, {"cursor", 120}}, 200);
    CHECK(later["detections"].size() == 19);
    post(c, "/detect", {{"dataset", drop}, {"event", "left_item"}, {"mode", "some"}}, 400);
    post(c, "/detect", {{"dataset", drop}, {"event", "juggling"}}, 400);
    post(c, "/detect", {{"dataset", "ds99"}, {"event", "left_item"}}, 404);

    const auto& b = corpus::storefront;
    const auto loiter = upload(c, corpus::to_xml(corpus::loiter_scenario(), "Loiter"),
                               {{{"id", "storefront"}, {"xc", b.xc}, {"yc", b.yc}, {"w", b.w}, {"h", b.h}}});
    const auto hits =
        post(c, "/detect", {{"dataset", loiter}, {"loitering", {{"area", "storefront"}, {"duration", 500}}}}, 200);
    REQUIRE(hits["detections"].size() == 1);
    CHECK(hits["detections"][0]["bindings"]["ID"] == "1");
    CHECK(hits["detections"][0]["steps"][0]["begin"] == 10);
    CHECK(hits["detections"][0]["steps"][0]["end"] == 600);
    const auto none = post(
        c, "/detect",
        {{"dataset", loiter}, {"loitering", {{"area", "storefront"}, {"duration", 500}, {"radius", 0}}}}, 200);
    CHECK(none["detections"].empty());
    post(c, "/detect", {{"dataset", loiter}, {"loitering", {{"area", "shop"}, {"duration", 500}}}}, 404);
}

TEST_CASE("monitoring over HTTP") {
    auto opts = quiet();
    Running s(std::move(opts));
    auto c = s.client();
    const auto drop = upload(c, corpus::to_xml(corpus::drop_scenario(), "Drop"));
    post(c, "/monitor/templates", {{"dataset", drop}, {"event", "left_item"}}, 201);
    post(c, "/monitor/templates", {{"dataset", drop}, {"event", "left_item"}}, 409);
    post(c, "/monitor/templates", {{"dataset", "ds42"}, {"event", "left_item"}}, 404);
    CHECK(body_of(c.Get("/monitor/templates"))["templates"] == json::array({"left_item"}));

    CHECK(body_of(c.Get("/monitor/detections"))["detections"].empty());
    s.service.monitor().tick();
    const auto polled = body_of(c.Get("/monitor/detections?since=0"));
    CHECK(polled["detections"].size() == 40);
    CHECK(polled["last"] == 40);
    CHECK(body_of(c.Get("/monitor/detections?since=40"))["detections"].empty());
    auto bad = c.Get("/monitor/detections?since=abc");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    auto removed = c.Delete("/monitor/templates/left_item");
    REQUIRE(removed);
    CHECK(removed->status == 200);
    auto again = c.Delete("/monitor/templates/left_item");
    REQUIRE(again);
    CHECK(again->status == 404);
}

TEST_CASE("the background monitor thread picks up templates") {
    ServiceOptions opts;
    opts.monitor.period = std::chrono::milliseconds(10);
    Running s(std::move(opts));
    auto c = s.client();
    const auto drop = upload(c, corpus::to_xml(corpus::drop_scenario(), "Drop"));
    post(c, "/monitor/templates", {{"dataset", drop}, {"event", "left_item"}, {"id", "watch"}}, 201);
    json polled;
    for (int i = 0; i < 300; ++i) {
        polled = body_of(c.Get("/monitor/detections"));
        if (!polled["detections"].empty()) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    REQUIRE_FALSE(polled["detections"].empty());
    CHECK(polled["detections"][0]["detection"]["event"] == "watch");
}
