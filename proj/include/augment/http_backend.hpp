// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "augment/backend.hpp"

namespace httplib {
class Server;
}

namespace augment {

enum class BackendKind { inpaint, embed, segment };

std::string_view to_string(BackendKind kind) noexcept;

struct BackendConfig {
    std::string endpoint;  // scheme://host:port, no trailing route
    int timeout_ms = 60000;
    int max_retries = 2;
    int max_in_flight = 4;
    std::string bearer_token;  // sent as "Authorization: Bearer ..." when set

    // Throws Error(config) if timeout <= 0, max_in_flight < 1 or max_retries < 0.
    void validate() const;
};

// Environment variable that overrides the endpoint of each backend kind.
const char* endpoint_env_var(BackendKind kind) noexcept;

// Returns cfg with its endpoint replaced by the kind's environment variable, if set.
BackendConfig apply_env_override(BackendConfig cfg, BackendKind kind);

// POSTs JSON bodies to one backend, with retry on transport failure and at
// most max_in_flight requests outstanding at once.
class HttpTransport {
  public:
    HttpTransport(BackendKind kind, BackendConfig cfg);

    nlohmann::json post(std::string_view route, const nlohmann::json& body);

    BackendKind kind() const noexcept { return kind_; }
    const BackendConfig& config() const noexcept { return cfg_; }

  private:
    BackendKind kind_;
    BackendConfig cfg_;
    std::counting_semaphore<> slots_;
};

class HttpInpaintClient final : public InpaintBackend {
  public:
    explicit HttpInpaintClient(BackendConfig cfg);
    InpaintResponse inpaint(const InpaintRequest& req) override;

  private:
    HttpTransport transport_;
};

class HttpEmbedClient final : public EmbedBackend {
  public:
    explicit HttpEmbedClient(BackendConfig cfg);
    EmbedResponse embed(const EmbedRequest& req) override;

  private:
    HttpTransport transport_;
    std::atomic<long long> dimension_{-1};
};

class HttpSegmentClient final : public SegmentBackend {
  public:
    explicit HttpSegmentClient(BackendConfig cfg);
    SegmentResponse segment(const SegmentRequest& req) override;

  private:
    HttpTransport transport_;
};

struct HttpBackendsConfig {
    BackendConfig inpaint;
    BackendConfig embed;
    BackendConfig segment;
};

// Applies environment overrides, validates, and builds the three clients.
Backends make_http_backends(const HttpBackendsConfig& cfg);

// Mounts /v1/inpaint, /v1/embed and /v1/segment on `server`, answering with
// `backends`. Used for the mock model server and in protocol tests.
void mount_backend_routes(httplib::Server& server, Backends backends);

} // namespace augment
