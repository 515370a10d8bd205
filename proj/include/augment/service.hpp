// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "augment/backend.hpp"
#include "augment/pipeline.hpp"

namespace httplib {
class Server;
}

namespace augment {

struct ServiceConfig {
    PipelineConfig pipeline;
    int job_workers = 2;
    int preview_max_edge = 512;
    std::size_t suggested_keys = 24;
    bool mount_mock_backends = false;  // also serve /v1/* from the mock trio
};

ServiceConfig service_config_from_json(const nlohmann::json& j);

// Studio backend over one task directory. The manifest (task.json) is the only
// persistent state; it is rewritten after every accepted sample or rejection.
//
// Routes:
//   POST /sessions                 {"base_image_id", "config"?, "seed"?}
//   PUT  /sessions/{id}/mask       {"mask": base64 PNG}
//   POST /sessions/{id}/generate
//   GET  /jobs/{id}
//   POST /jobs/{id}/decisions      {"key": "0b11:0,1" | "variation": {...}, "accept": bool}
//   GET  /tasks/{id}/manifest
class PipelineService {
  public:
    // Loads task_dir/task.json; throws if it is missing or invalid.
    PipelineService(std::filesystem::path task_dir, ServiceConfig cfg, Backends backends);
    ~PipelineService();

    PipelineService(const PipelineService&) = delete;
    PipelineService& operator=(const PipelineService&) = delete;

    // Route bodies, callable without HTTP. Each throws Error on failure.
    nlohmann::json create_session(const nlohmann::json& body);
    nlohmann::json submit_mask(std::string_view session_id, const BitMask& mask);
    nlohmann::json start_generation(std::string_view session_id);
    nlohmann::json get_job(std::string_view job_id) const;
    nlohmann::json decide(std::string_view job_id, const nlohmann::json& body);
    nlohmann::json manifest(std::string_view task_id) const;

    std::string task_id() const;

    // Blocks until every queued job has finished.
    void wait_idle();

    void mount(httplib::Server& server);

    // Binds (port 0 picks a free port) and returns the bound port.
    int bind(const std::string& host, int port);
    // Serves until stop(); requires bind().
    void listen();
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Creates task_dir/task.json with only the annotated support records when it
// does not exist yet.
void init_task_dir(const FewShotTask& task, const std::filesystem::path& source_root,
                   const PipelineConfig& cfg, const std::filesystem::path& task_dir);

} // namespace augment
