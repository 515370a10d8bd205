// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/http_backend.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "augment/error.hpp"
#include "augment/wire.hpp"

namespace augment {

using nlohmann::json;

std::string_view to_string(BackendKind kind) noexcept {
    switch (kind) {
    case BackendKind::inpaint: return "inpaint";
    case BackendKind::embed: return "embed";
    case BackendKind::segment: return "segment";
    }
    return "unknown";
}

const char* endpoint_env_var(BackendKind kind) noexcept {
    switch (kind) {
    case BackendKind::inpaint: return "INPAINT_URL";
    case BackendKind::embed: return "EMBED_URL";
    case BackendKind::segment: return "SEGMENT_URL";
    }
    return "";
}

BackendConfig apply_env_override(BackendConfig cfg, BackendKind kind) {
    if (const char* url = std::getenv(endpoint_env_var(kind)); url != nullptr && *url != '\0')
        cfg.endpoint = url;
    return cfg;
}

void BackendConfig::validate() const {
    if (timeout_ms <= 0) throw Error(ErrorKind::config, "backend timeout must be > 0 ms");
    if (max_in_flight < 1) throw Error(ErrorKind::config, "backend max_in_flight must be >= 1");
    if (max_retries < 0) throw Error(ErrorKind::config, "backend max_retries must be >= 0");
    if (endpoint.empty()) throw Error(ErrorKind::config, "backend endpoint is empty");
}

namespace {

class SlotGuard {
  public:
    explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

  private:
    std::counting_semaphore<>& sem_;
};

std::string remote_message(const httplib::Result& res) {
    try {
        const auto body = json::parse(res->body);
        if (body.is_object() && body.contains("message")) {
            std::string msg = body.value("message", "");
            if (body.contains("code") && body["code"].is_string())
                msg = body["code"].get<std::string>() + ": " + msg;
            return msg;
        }
    } catch (const json::exception&) {
    }
    return res->body;
}

} // namespace

HttpTransport::HttpTransport(BackendKind kind, BackendConfig cfg)
    : kind_(kind), cfg_(std::move(cfg)), slots_(std::max(1, cfg_.max_in_flight)) {
    cfg_.validate();
}

json HttpTransport::post(std::string_view route, const json& body) {
    const std::string payload = body.dump();
    const std::string path(route);
    const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
    std::string last_error;

    SlotGuard slot(slots_);
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        httplib::Client cli(cfg_.endpoint);
        cli.set_connection_timeout(timeout);
        cli.set_read_timeout(timeout);
        cli.set_write_timeout(timeout);
        if (!cfg_.bearer_token.empty()) cli.set_bearer_token_auth(cfg_.bearer_token);

        auto res = cli.Post(path, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            spdlog::debug("{} backend attempt {} failed: {}", to_string(kind_), attempt + 1,
                          last_error);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error(ErrorKind::remote, std::string(to_string(kind_)) + " backend returned " +
                                               std::to_string(res->status) + ": " +
                                               remote_message(res));
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::protocol, std::string(to_string(kind_)) +
                                                 " backend sent malformed JSON: " + e.what());
        }
    }
    throw Error(ErrorKind::transport, std::string(to_string(kind_)) + " backend unreachable at " +
                                          cfg_.endpoint + " after " +
                                          std::to_string(cfg_.max_retries + 1) +
                                          " attempt(s): " + last_error);
}

HttpInpaintClient::HttpInpaintClient(BackendConfig cfg)
    : transport_(BackendKind::inpaint, std::move(cfg)) {}

InpaintResponse HttpInpaintClient::inpaint(const InpaintRequest& req) {
    validate(req);
    const auto start = std::chrono::steady_clock::now();
    auto resp = wire::inpaint_response_from_json(
        transport_.post(wire::kInpaintRoute, wire::to_json(req)));
    resp.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    validate(req, resp);
    return resp;
}

HttpEmbedClient::HttpEmbedClient(BackendConfig cfg)
    : transport_(BackendKind::embed, std::move(cfg)) {}

EmbedResponse HttpEmbedClient::embed(const EmbedRequest& req) {
    auto resp =
        wire::embed_response_from_json(transport_.post(wire::kEmbedRoute, wire::to_json(req)));
    const auto dim = static_cast<long long>(resp.vector.size());
    long long expected = -1;
    if (!dimension_.compare_exchange_strong(expected, dim) && expected != dim) {
        throw Error(ErrorKind::protocol, "embed backend changed dimension from " +
                                             std::to_string(expected) + " to " +
                                             std::to_string(dim));
    }
    return resp;
}

HttpSegmentClient::HttpSegmentClient(BackendConfig cfg)
    : transport_(BackendKind::segment, std::move(cfg)) {}

SegmentResponse HttpSegmentClient::segment(const SegmentRequest& req) {
    validate(req);
    auto resp =
        wire::segment_response_from_json(transport_.post(wire::kSegmentRoute, wire::to_json(req)));
    validate(req, resp);
    return resp;
}

Backends make_http_backends(const HttpBackendsConfig& cfg) {
    return {std::make_shared<HttpInpaintClient>(apply_env_override(cfg.inpaint, BackendKind::inpaint)),
            std::make_shared<HttpEmbedClient>(apply_env_override(cfg.embed, BackendKind::embed)),
            std::make_shared<HttpSegmentClient>(
                apply_env_override(cfg.segment, BackendKind::segment))};
}

namespace {

int status_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::geometry:
    case ErrorKind::validation:
    case ErrorKind::protocol:
    case ErrorKind::config:
        return 400;
    case ErrorKind::not_found: return 404;
    default: return 500;
    }
}

template <class Handler>
void serve_json(const httplib::Request& req, httplib::Response& res, Handler&& handler) {
    try {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::protocol, std::string("malformed JSON body: ") + e.what());
        }
        res.set_content(handler(body).dump(), "application/json");
    } catch (const Error& e) {
        res.status = status_for(e.kind());
        res.set_content(wire::error_envelope(to_string(e.kind()), e.what()).dump(),
                        "application/json");
    } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(wire::error_envelope("internal", e.what()).dump(), "application/json");
    }
}

} // namespace

void mount_backend_routes(httplib::Server& server, Backends backends) {
    server.Post(std::string(wire::kInpaintRoute),
                [b = backends.inpaint](const httplib::Request& req, httplib::Response& res) {
                    serve_json(req, res, [&](const json& body) {
                        return wire::to_json(b->inpaint(wire::inpaint_request_from_json(body)));
                    });
                });
    server.Post(std::string(wire::kEmbedRoute),
                [b = backends.embed](const httplib::Request& req, httplib::Response& res) {
                    serve_json(req, res, [&](const json& body) {
                        return wire::to_json(b->embed(wire::embed_request_from_json(body)));
                    });
                });
    server.Post(std::string(wire::kSegmentRoute),
                [b = backends.segment](const httplib::Request& req, httplib::Response& res) {
                    serve_json(req, res, [&](const json& body) {
                        return wire::to_json(b->segment(wire::segment_request_from_json(body)));
                    });
                });
}

} // namespace augment
