#pragma once

#include "versa/events.hpp"
#include "versa/kb.hpp"

#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stop_token>
#include <string>
#include <vector>

namespace versa {

inline constexpr int kDetectionRecordVersion = 1;

struct DetectionRecord {
    std::uint64_t seq = 0;
    std::string timestamp;  // UTC, ISO 8601
    std::string dataset;
    std::string key;
    Detection detection;
};

nlohmann::json to_json(const DetectionRecord& record);
DetectionRecord detection_record_from_json(const nlohmann::json& doc);

struct MonitorActions {
    bool console = false;
    std::optional<std::filesystem::path> log_path;
    std::optional<std::string> webhook_url;  // http://host[:port]/path
};

struct MonitorConfig {
    std::chrono::milliseconds period{1000};
    MonitorActions actions;
    MatchOptions match;

    void validate() const;
};

struct TickReport {
    std::vector<DetectionRecord> fired;
    std::vector<std::string> failures;
    std::map<std::string, EvalStats> stats;  // per template id
};

/// Periodically evaluates registered event templates against the frames
/// each store gained since the previous tick and fires the configured
/// actions once per new detection.
class Monitor {
public:
    explicit Monitor(MonitorConfig cfg, std::ostream* console = nullptr);

    /// Takes effect at the next tick. Throws duplicate when the id is taken.
    void add_template(EventTemplate event, std::string dataset, std::shared_ptr<StoreHandle> store);
    bool remove_template(const std::string& id);
    std::vector<std::string> template_ids() const;
    std::optional<FrameNum> cursor(const std::string& id) const;

    TickReport tick();
    /// Ticks every period until stop is requested.
    void run(std::stop_token stop);

    std::vector<DetectionRecord> detections_since(std::uint64_t seq) const;
    const MonitorConfig& config() const noexcept { return cfg_; }

private:
    struct Entry {
        EventTemplate event;
        std::string dataset;
        std::shared_ptr<StoreHandle> store;
        std::optional<FrameNum> cursor;
    };
    enum Action : unsigned { console_action = 1, log_action = 2, webhook_action = 4 };
    struct Pending {
        DetectionRecord record;
        unsigned actions = 0;
    };

    void load_log();
    unsigned deliver(const DetectionRecord& record, unsigned actions, std::vector<std::string>& failures);

    MonitorConfig cfg_;
    std::ostream* console_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, Entry> registry_;
    std::mutex tick_mutex_;
    mutable std::mutex records_mutex_;
    std::vector<DetectionRecord> records_;
    std::set<std::string> emitted_;
    std::vector<Pending> pending_;
    std::uint64_t next_seq_ = 1;
};

std::string utc_timestamp(std::chrono::system_clock::time_point when = std::chrono::system_clock::now());

}  // namespace versa
