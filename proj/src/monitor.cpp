#include "versa/monitor.hpp"

#include "versa/error.hpp"
#include "versa/template_io.hpp"

#include <httplib.h>

#include <ctime>
#include <fstream>
#include <ostream>
#include <thread>

namespace versa {

using nlohmann::json;

std::string utc_timestamp(std::chrono::system_clock::time_point when) {
    const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(when);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(when - secs).count();
    const std::time_t t = std::chrono::system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

json to_json(const DetectionRecord& r) {
    return {{"version", kDetectionRecordVersion}, {"seq", r.seq},           {"timestamp", r.timestamp},
            {"dataset", r.dataset},               {"key", r.key},           {"detection", to_json(r.detection)}};
}

DetectionRecord detection_record_from_json(const json& doc) {
    try {
        if (doc.at("version").get<int>() != kDetectionRecordVersion) {
            throw Error(ErrorCode::parse_error, "unsupported detection record version");
        }
        return {doc.at("seq").get<std::uint64_t>(), doc.at("timestamp").get<std::string>(),
                doc.at("dataset").get<std::string>(), doc.at("key").get<std::string>(),
                detection_from_json(doc.at("detection"))};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("bad detection record: ") + e.what());
    }
}

void MonitorConfig::validate() const {
    if (period.count() <= 0) throw Error(ErrorCode::invalid_argument, "poll period must be positive");
    if (actions.webhook_url && !actions.webhook_url->starts_with("http://")) {
        throw Error(ErrorCode::invalid_argument, "webhook URL must start with http://");
    }
    versa::validate(match.spatial);
}

Monitor::Monitor(MonitorConfig cfg, std::ostream* console) : cfg_(std::move(cfg)), console_(console) {
    cfg_.validate();
    load_log();
}

void Monitor::load_log() {
    if (!cfg_.actions.log_path) return;
    std::ifstream in(*cfg_.actions.log_path);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const auto doc = json::parse(line);
            emitted_.insert(doc.at("key").get<std::string>());
            next_seq_ = std::max(next_seq_, doc.at("seq").get<std::uint64_t>() + 1);
        } catch (const json::exception&) {
            // a torn last line from an interrupted append; the key is rewritten when re-detected
        }
    }
}

void Monitor::add_template(EventTemplate event, std::string dataset, std::shared_ptr<StoreHandle> store) {
    event.validate();
    if (!store) throw Error(ErrorCode::invalid_argument, "monitor template needs a store");
    std::lock_guard lock(registry_mutex_);
    const auto id = event.id;
    if (registry_.contains(id)) throw Error(ErrorCode::duplicate, "template " + id + " is already monitored");
    registry_.emplace(id, Entry{std::move(event), std::move(dataset), std::move(store), std::nullopt});
}

bool Monitor::remove_template(const std::string& id) {
    std::lock_guard lock(registry_mutex_);
    return registry_.erase(id) > 0;
}

std::vector<std::string> Monitor::template_ids() const {
    std::lock_guard lock(registry_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, e] : registry_) ids.push_back(id);
    return ids;
}

std::optional<FrameNum> Monitor::cursor(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = registry_.find(id);
    return it == registry_.end() ? std::nullopt : it->second.cursor;
}

unsigned Monitor::deliver(const DetectionRecord& record, unsigned actions, std::vector<std::string>& failures) {
    unsigned failed = 0;
    const auto line = to_json(record).dump();
    if ((actions & console_action) && console_) {
        *console_ << record.timestamp << " [" << record.dataset << "] " << format(record.detection) << std::endl;
    }
    if (actions & log_action) {
        std::ofstream out(*cfg_.actions.log_path, std::ios::app);
        if (out) out << line << '\n' << std::flush;
        if (!out) {
            failed |= log_action;
            failures.push_back("cannot append to " + cfg_.actions.log_path->string());
        }
    }
    if (actions & webhook_action) {
        const auto& url = *cfg_.actions.webhook_url;
        const auto slash = url.find('/', std::string_view("http://").size());
        const auto origin = slash == std::string::npos ? url : url.substr(0, slash);
        const auto path = slash == std::string::npos ? std::string("/") : url.substr(slash);
        httplib::Client client(origin);
        client.set_connection_timeout(std::chrono::seconds(2));
        client.set_read_timeout(std::chrono::seconds(5));
        auto res = client.Post(path, line, "application/json");
        if (!res || res->status < 200 || res->status >= 300) {
            failed |= webhook_action;
            failures.push_back("webhook " + url + " failed: " +
                               (res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error())));
        }
    }
    return failed;
}

TickReport Monitor::tick() {
    std::lock_guard tick_lock(tick_mutex_);
    TickReport report;

    std::vector<Pending> retry;
    retry.swap(pending_);
    for (auto& p : retry) {
        if (auto failed = deliver(p.record, p.actions, report.failures)) pending_.push_back({p.record, failed});
    }

    std::vector<std::pair<std::string, Entry>> entries;
    {
        std::lock_guard lock(registry_mutex_);
        for (const auto& [id, e] : registry_) entries.emplace_back(id, e);
    }

    unsigned actions = console_action;
    if (cfg_.actions.log_path) actions |= log_action;
    if (cfg_.actions.webhook_url) actions |= webhook_action;
    if (!cfg_.actions.console) actions &= ~console_action;

    for (auto& [id, entry] : entries) {
        const auto snapshot = entry.store->snapshot();
        const auto hw = snapshot->high_water();
        if (!hw || (entry.cursor && *entry.cursor >= *hw)) continue;
        EvalStats stats;
        try {
            EvalOptions opts;
            opts.mode = SearchMode::all;
            opts.cursor = entry.cursor;
            opts.match = cfg_.match;
            opts.stats = &stats;
            for (auto& d : evaluate_event(*snapshot, entry.event, opts)) {
                auto key = entry.dataset + "|" + d.key();
                {
                    std::lock_guard lock(records_mutex_);
                    if (!emitted_.insert(key).second) continue;
                }
                DetectionRecord record{0, utc_timestamp(), entry.dataset, std::move(key), std::move(d)};
                {
                    std::lock_guard lock(records_mutex_);
                    record.seq = next_seq_++;
                    records_.push_back(record);
                }
                if (auto failed = deliver(record, actions, report.failures)) pending_.push_back({record, failed});
                report.fired.push_back(std::move(record));
            }
        } catch (const std::exception& e) {
            report.failures.push_back("template " + id + ": " + e.what());
            continue;
        }
        report.stats[id] = stats;
        std::lock_guard lock(registry_mutex_);
        if (auto it = registry_.find(id); it != registry_.end() && it->second.store == entry.store) {
            it->second.cursor = hw;
        }
    }
    if (console_) {
        for (const auto& f : report.failures) *console_ << "monitor: " << f << std::endl;
    }
    return report;
}

void Monitor::run(std::stop_token stop) {
    std::mutex m;
    std::condition_variable_any cv;
    while (!stop.stop_requested()) {
        tick();
        std::unique_lock lock(m);
        cv.wait_for(lock, stop, cfg_.period, [] { return false; });
    }
}

std::vector<DetectionRecord> Monitor::detections_since(std::uint64_t seq) const {
    std::lock_guard lock(records_mutex_);
    std::vector<DetectionRecord> out;
    for (const auto& r : records_) {
        if (r.seq > seq) out.push_back(r);
    }
    return out;
}

}  // namespace versa
