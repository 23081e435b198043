#pragma once

#include "versa/cvml.hpp"
#include "versa/monitor.hpp"

#include <httplib.h>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace versa {

inline constexpr int kApiVersion = 1;

struct ServiceOptions {
    cvml::IngestConfig ingest;
    MonitorConfig monitor;
    /// Served under /assets when set.
    std::optional<std::filesystem::path> static_dir;
    /// Runs monitor ticks on a background thread.
    bool monitor_thread = true;
};

/// HTTP backend for the authoring UI and for scripted clients.
class Service {
public:
    explicit Service(ServiceOptions opts);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds to host:port (port 0 picks a free port) and returns the port.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop() is called.
    void listen_after_bind();
    void stop();

    Monitor& monitor() { return monitor_; }
    /// Registers a dataset under a fresh id.
    std::string add_dataset(const cvml::Dataset& dataset, const std::vector<StaticEntity>& statics,
                            const cvml::TypeMapping& mapping);
    std::shared_ptr<StoreHandle> dataset_store(const std::string& id) const;

private:
    struct DatasetEntry {
        std::string name;
        std::shared_ptr<StoreHandle> store;
    };

    void routes();

    ServiceOptions opts_;
    httplib::Server server_;
    Monitor monitor_;
    mutable std::mutex datasets_mutex_;
    std::map<std::string, DatasetEntry> datasets_;
    std::uint64_t next_dataset_ = 1;
    std::jthread monitor_thread_;
};

}  // namespace versa
