// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "augment/codec.hpp"
#include "augment/error.hpp"
#include "augment/mock_backend.hpp"
#include "augment/wire.hpp"

namespace augment {

using nlohmann::json;
namespace fs = std::filesystem;

ServiceConfig service_config_from_json(const json& j) {
    ServiceConfig cfg;
    cfg.pipeline = pipeline_config_from_json(j);
    if (j.contains("service")) {
        const auto& s = j["service"];
        try {
            cfg.job_workers = s.value("job_workers", cfg.job_workers);
            cfg.preview_max_edge = s.value("preview_max_edge", cfg.preview_max_edge);
            cfg.suggested_keys = s.value("suggested_keys", cfg.suggested_keys);
            cfg.mount_mock_backends = s.value("mock_backends", cfg.mount_mock_backends);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::config, std::string("service config: ") + e.what());
        }
    }
    if (cfg.job_workers < 1) throw Error(ErrorKind::config, "service.job_workers must be >= 1");
    if (cfg.preview_max_edge < 1) throw Error(ErrorKind::config, "service.preview_max_edge must be >= 1");
    return cfg;
}

void init_task_dir(const FewShotTask& task, const fs::path& source_root,
                   const PipelineConfig& cfg, const fs::path& task_dir) {
    if (fs::exists(task_dir / "task.json")) return;
    Provenance prov;
    prov.seed = cfg.seed;
    prov.config = to_json(cfg);
    prov.config_hash = config_hash(prov.config);
    export_augmented(task, source_root, {}, prov, task_dir);
}

namespace {

enum class JobState { queued, running, done, failed };

std::string_view to_string(JobState s) {
    switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    }
    return "unknown";
}

struct Session {
    std::string id;
    std::string base_id;
    RasterImage base{1, 1};
    std::mutex mutex;  // guards the fields below
    BitMask placement{1, 1};
    std::vector<RegionSpec> regions;
    PipelineConfig cfg;
};

struct Job {
    std::string id;
    std::string session_id;
    std::string base_id;
    RasterImage base{1, 1};
    BitMask placement{1, 1};
    PipelineConfig cfg;

    mutable std::mutex mutex;  // guards the fields below
    JobState state = JobState::queued;
    std::size_t done = 0;
    std::size_t total = 0;
    std::shared_ptr<const BaseGeneration> generation;  // set together with state=done
    json results = json::array();
    std::string error;
};

json flags_json(unsigned flags) {
    json out = json::array();
    if (flags & kBelowThreshold) out.push_back("below_threshold");
    if (flags & kMaskFallback) out.push_back("mask_fallback");
    return out;
}

json region_summary(const RegionSpec& r) {
    return {{"index", r.index},
            {"rect", wire::to_json(r.rect)},
            {"component_bbox", wire::to_json(r.component_bbox)},
            {"pixels", popcount(r.region_mask)},
            {"coverage", r.coverage},
            {"feasible", r.feasible}};
}

RasterImage preview_image(const RasterImage& img, int max_edge) {
    const int edge = std::max(img.width(), img.height());
    if (edge <= max_edge) return img;
    const double s = static_cast<double>(max_edge) / edge;
    return resize_nearest(img, std::max(1, static_cast<int>(img.width() * s)),
                          std::max(1, static_cast<int>(img.height() * s)));
}

std::string next_id(const char* prefix, std::size_t& counter) {
    return prefix + std::to_string(counter++);
}

bool is_index(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

int http_status(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::geometry:
    case ErrorKind::validation:
    case ErrorKind::protocol:
    case ErrorKind::config:
    case ErrorKind::numeric:
    case ErrorKind::overflow:
        return 400;
    case ErrorKind::transport:
    case ErrorKind::remote:
        return 502;
    default: return 500;
    }
}

} // namespace

struct PipelineService::Impl {
    fs::path dir;
    ServiceConfig cfg;
    Backends backends;
    std::vector<RasterImage> references;

    mutable std::mutex manifest_mutex;
    DatasetManifest manifest;

    mutable std::mutex registry_mutex;
    std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions;
    std::map<std::string, std::shared_ptr<Job>, std::less<>> jobs;
    std::size_t session_counter = 1;
    std::size_t job_counter = 1;

    std::mutex queue_mutex;
    std::condition_variable queue_cv;
    std::condition_variable idle_cv;
    std::deque<std::shared_ptr<Job>> queue;
    std::size_t active = 0;
    bool stopping = false;
    std::vector<std::jthread> workers;

    std::unique_ptr<httplib::Server> server;

    std::shared_ptr<Session> session(std::string_view id) const {
        std::lock_guard lock(registry_mutex);
        auto it = sessions.find(id);
        if (it == sessions.end())
            throw Error(ErrorKind::not_found, "unknown session \"" + std::string(id) + "\"");
        return it->second;
    }

    std::shared_ptr<Job> job(std::string_view id) const {
        std::lock_guard lock(registry_mutex);
        auto it = jobs.find(id);
        if (it == jobs.end()) throw Error(ErrorKind::not_found, "unknown job \"" + std::string(id) + "\"");
        return it->second;
    }

    void worker_loop() {
        for (;;) {
            std::shared_ptr<Job> j;
            {
                std::unique_lock lock(queue_mutex);
                queue_cv.wait(lock, [&] { return stopping || !queue.empty(); });
                if (stopping && queue.empty()) return;
                j = std::move(queue.front());
                queue.pop_front();
                ++active;
            }
            run_job(*j);
            {
                std::lock_guard lock(queue_mutex);
                --active;
            }
            idle_cv.notify_all();
        }
    }

    void run_job(Job& j) {
        {
            std::lock_guard lock(j.mutex);
            j.state = JobState::running;
        }
        try {
            auto gen = std::make_shared<BaseGeneration>(generate_for_base(
                j.base_id, j.base, j.placement, references, j.cfg, backends, RunSeed{j.cfg.seed},
                [&](std::size_t done, std::size_t total) {
                    std::lock_guard lock(j.mutex);
                    j.done = done;
                    j.total = total;
                }));
            json results = json::array();
            for (const auto& per_region : gen->variations) {
                for (const auto& v : per_region) {
                    const auto& region = gen->regions[v.region_index];
                    const RasterImage composite = composite_region(gen->base, region, v.image);
                    results.push_back(
                        {{"region", v.region_index},
                         {"variation", v.variation_index},
                         {"similarity", v.similarity},
                         {"reference_index", v.reference_index},
                         {"kept_reference_index", v.kept_reference_index},
                         {"attempts_used", v.attempts_used},
                         {"flags", flags_json(v.flags)},
                         {"refined_pixels", popcount(v.refined_mask)},
                         {"preview", wire::encode_image(preview_image(composite, cfg.preview_max_edge))}});
                }
            }
            std::lock_guard lock(j.mutex);
            j.generation = std::move(gen);
            j.results = std::move(results);
            j.done = j.total;
            j.state = JobState::done;
        } catch (const std::exception& e) {
            spdlog::warn("job {} failed: {}", j.id, e.what());
            std::lock_guard lock(j.mutex);
            j.error = e.what();
            j.state = JobState::failed;
        }
    }

    bool tombstoned(const json& t, const std::string& base_id, std::uint64_t seed) const {
        return t.value("base", "") == base_id && t.value("seed", std::uint64_t{0}) == seed;
    }

    // Full space for the job minus rejected variations. Caller holds manifest_mutex.
    ChoiceSpace available_space(const BaseGeneration& gen, std::uint64_t seed) const {
        ChoiceSpace space(gen.regions.size(), gen.variations.empty() ? 0 : gen.variations[0].size());
        for (const auto& t : manifest.provenance.tombstones) {
            if (!tombstoned(t, gen.base_id, seed) || !t.contains("region")) continue;
            const auto n = t["region"].get<std::size_t>();
            if (n < space.regions()) space.remove(n, t["variation"].get<std::uint32_t>());
        }
        return space;
    }

    bool key_rejected(const std::string& base_id, std::uint64_t seed, const CombinationKey& key) const {
        const std::string text = to_string(key);
        for (const auto& t : manifest.provenance.tombstones)
            if (tombstoned(t, base_id, seed) && t.value("key", "") == text) return true;
        return false;
    }

    void add_tombstone(json t, json& delta) {
        auto& list = manifest.provenance.tombstones;
        if (std::find(list.begin(), list.end(), t) == list.end()) {
            list.push_back(t);
            save_manifest(manifest, dir / "task.json");
        }
        delta["tombstoned"].push_back(std::move(t));
    }

    void accept_key(const Job& j, const BaseGeneration& gen, const CombinationKey& key, json& delta) {
        const std::size_t l = gen.variations.front().size();
        validate_key(key, gen.regions.size(), l);
        const std::uint64_t seed = j.cfg.seed;
        const ChoiceSpace space = available_space(gen, seed);
        for (std::size_t n = 0; n < gen.regions.size(); ++n) {
            if (!key.includes(n)) continue;
            const auto& allowed = space.allowed(n);
            if (std::find(allowed.begin(), allowed.end(), key.choice_for(n)) == allowed.end())
                throw Error(ErrorKind::validation, "key " + to_string(key) + " uses rejected variation " +
                                                       std::to_string(key.choice_for(n)) + " of region " +
                                                       std::to_string(n));
        }
        if (key_rejected(gen.base_id, seed, key))
            throw Error(ErrorKind::validation, "key " + to_string(key) + " was rejected");
        GeneratedSample s{realize(gen.base, gen.regions, gen.variations, key), gen.base_id,
                          gen.regions.size(), seed, SampleOrigin::generated};
        const std::string id = sample_id(s);
        if (manifest.find(id) != nullptr) {
            delta["duplicate"] = true;
            delta["record"] = id;
            return;
        }
        auto rec = write_sample(s, dir);
        manifest.samples.push_back(rec);
        save_manifest(manifest, dir / "task.json");
        delta["added"].push_back(to_json(rec));
    }
};

PipelineService::PipelineService(fs::path task_dir, ServiceConfig cfg, Backends backends)
    : impl_(std::make_unique<Impl>()) {
    cfg.pipeline.validate();
    impl_->dir = std::move(task_dir);
    impl_->cfg = std::move(cfg);
    impl_->backends = std::move(backends);
    impl_->manifest = load_manifest(impl_->dir / "task.json");
    impl_->references = load_references(impl_->manifest.task, impl_->dir);
    for (int i = 0; i < impl_->cfg.job_workers; ++i)
        impl_->workers.emplace_back([this] { impl_->worker_loop(); });
}

PipelineService::~PipelineService() {
    if (impl_->server) impl_->server->stop();
    {
        std::lock_guard lock(impl_->queue_mutex);
        impl_->stopping = true;
    }
    impl_->queue_cv.notify_all();
    impl_->workers.clear();  // joins
}

std::string PipelineService::task_id() const {
    auto name = impl_->dir.filename().string();
    if (name.empty()) name = impl_->dir.parent_path().filename().string();
    return name;
}

json PipelineService::create_session(const json& body) {
    auto& im = *impl_;
    if (!body.is_object()) throw Error(ErrorKind::validation, "session body must be an object");
    std::string base_id;
    if (body.contains("base_image_id") && body["base_image_id"].is_string()) {
        base_id = body["base_image_id"].get<std::string>();
    } else if (body.contains("base_image_id") && is_index(body["base_image_id"])) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "base_%03zu", body["base_image_id"].get<std::size_t>());
        base_id = buf;
    } else {
        throw Error(ErrorKind::validation, "session body needs \"base_image_id\"");
    }

    ImageMaskPair entry;
    {
        std::lock_guard lock(im.manifest_mutex);
        const auto& pool = im.manifest.task.base_pool;
        auto it = std::find_if(pool.begin(), pool.end(), [&](const ImageMaskPair& p) {
            return fs::path(p.image).stem() == base_id;
        });
        if (it == pool.end()) throw Error(ErrorKind::not_found, "unknown base image \"" + base_id + "\"");
        entry = *it;
    }

    json merged = to_json(im.cfg.pipeline);
    if (body.contains("config")) merged.merge_patch(body["config"]);
    if (body.contains("seed")) merged["seed"] = body["seed"];
    PipelineConfig cfg = pipeline_config_from_json(merged);

    RasterImage base = read_png_image(im.dir / entry.image);
    BitMask placement = read_png_mask(im.dir / entry.mask);
    auto regions = extract_regions(base, placement, cfg.band);

    std::string id;
    {
        std::lock_guard lock(im.registry_mutex);
        id = next_id("s", im.session_counter);
    }
    auto s = std::make_shared<Session>();
    s->id = id;
    s->base_id = base_id;
    s->base = std::move(base);
    s->placement = std::move(placement);
    s->regions = std::move(regions);
    s->cfg = std::move(cfg);
    json out = {{"id", id},
                {"base_image_id", base_id},
                {"width", s->base.width()},
                {"height", s->base.height()},
                {"seed", s->cfg.seed}};
    json summaries = json::array();
    for (const auto& r : s->regions) summaries.push_back(region_summary(r));
    out["regions"] = std::move(summaries);
    {
        std::lock_guard lock(im.registry_mutex);
        im.sessions.emplace(id, std::move(s));
    }
    return out;
}

json PipelineService::submit_mask(std::string_view session_id, const BitMask& mask) {
    auto s = impl_->session(session_id);
    std::lock_guard lock(s->mutex);
    if (mask.width() != s->base.width() || mask.height() != s->base.height())
        throw Error(ErrorKind::geometry, "mask is " + std::to_string(mask.width()) + "x" +
                                             std::to_string(mask.height()) + " but base image is " +
                                             std::to_string(s->base.width()) + "x" +
                                             std::to_string(s->base.height()));
    s->regions = extract_regions(s->base, mask, s->cfg.band);
    s->placement = mask;
    json summaries = json::array();
    for (const auto& r : s->regions) summaries.push_back(region_summary(r));
    return {{"session_id", s->id}, {"count", s->regions.size()}, {"regions", std::move(summaries)}};
}

json PipelineService::start_generation(std::string_view session_id) {
    auto& im = *impl_;
    auto s = im.session(session_id);
    auto j = std::make_shared<Job>();
    {
        std::lock_guard lock(s->mutex);
        if (s->regions.empty())
            throw Error(ErrorKind::validation, "session " + s->id + " has no regions; submit a placement mask first");
        j->session_id = s->id;
        j->base_id = s->base_id;
        j->base = s->base;
        j->placement = s->placement;
        j->cfg = s->cfg;
        j->total = s->regions.size() * static_cast<std::size_t>(s->cfg.generation.variations_per_region);
    }
    {
        std::lock_guard lock(im.registry_mutex);
        j->id = next_id("j", im.job_counter);
        im.jobs.emplace(j->id, j);
    }
    {
        std::lock_guard lock(im.queue_mutex);
        im.queue.push_back(j);
    }
    im.queue_cv.notify_one();
    return get_job(j->id);
}

json PipelineService::get_job(std::string_view job_id) const {
    const auto& im = *impl_;
    auto j = im.job(job_id);
    JobState state;
    std::shared_ptr<const BaseGeneration> gen;
    json out = {{"id", j->id}, {"session_id", j->session_id}, {"base_image_id", j->base_id}};
    {
        std::lock_guard lock(j->mutex);
        state = j->state;
        gen = j->generation;
        out["state"] = to_string(state);
        out["progress"] = {{"done", j->done}, {"total", j->total}};
        out["results"] = j->results;
        if (state == JobState::failed) out["error"] = j->error;
    }
    if (state == JobState::done && gen) {
        const std::size_t n = gen->regions.size();
        const std::size_t l = gen->variations.empty() ? 0 : gen->variations.front().size();
        out["regions"] = n;
        out["variations_per_region"] = l;
        out["combinations"] = n == 0 ? 0 : count_combinations(n, l);
        std::lock_guard lock(im.manifest_mutex);
        const ChoiceSpace space = im.available_space(*gen, j->cfg.seed);
        out["available_combinations"] = space.size().value_or(0);
        json keys = json::array();
        for (const auto& key : sample_keys(space, im.cfg.suggested_keys, mix64(j->cfg.seed ^ n))) {
            if (!im.key_rejected(gen->base_id, j->cfg.seed, key)) keys.push_back(to_string(key));
        }
        out["suggested_keys"] = std::move(keys);
    }
    return out;
}

json PipelineService::decide(std::string_view job_id, const json& body) {
    auto& im = *impl_;
    auto j = im.job(job_id);
    std::shared_ptr<const BaseGeneration> gen;
    {
        std::lock_guard lock(j->mutex);
        if (j->state != JobState::done)
            throw Error(ErrorKind::validation, "job " + j->id + " is " + std::string(to_string(j->state)) +
                                                   "; decisions need a finished job");
        gen = j->generation;
    }
    if (!body.is_object() || !body.contains("accept") || !body["accept"].is_boolean())
        throw Error(ErrorKind::validation, "decision needs a boolean \"accept\"");
    const bool accept = body["accept"].get<bool>();
    const std::uint64_t seed = j->cfg.seed;

    json delta = {{"added", json::array()}, {"tombstoned", json::array()}};
    std::lock_guard lock(im.manifest_mutex);
    if (body.contains("key")) {
        if (!body["key"].is_string()) throw Error(ErrorKind::validation, "\"key\" must be a string");
        const auto key = parse_combination_key(body["key"].get<std::string>());
        if (accept) {
            im.accept_key(*j, *gen, key, delta);
        } else {
            validate_key(key, gen->regions.size(), gen->variations.front().size());
            im.add_tombstone({{"base", gen->base_id}, {"seed", seed}, {"key", to_string(key)}}, delta);
        }
    } else if (body.contains("variation")) {
        const auto& v = body["variation"];
        if (!v.is_object() || !v.contains("region") || !v.contains("variation") ||
            !is_index(v["region"]) || !is_index(v["variation"]))
            throw Error(ErrorKind::validation, "\"variation\" needs unsigned \"region\" and \"variation\"");
        const auto n = v["region"].get<std::size_t>();
        const auto l = v["variation"].get<std::uint32_t>();
        if (n >= gen->regions.size() || l >= gen->variations.front().size())
            throw Error(ErrorKind::validation, "variation (" + std::to_string(n) + ", " +
                                                   std::to_string(l) + ") is out of range");
        if (accept) {
            im.accept_key(*j, *gen, CombinationKey{std::uint64_t{1} << n, {l}}, delta);
        } else {
            im.add_tombstone({{"base", gen->base_id}, {"seed", seed}, {"region", n}, {"variation", l}},
                             delta);
        }
    } else {
        throw Error(ErrorKind::validation, "decision needs \"key\" or \"variation\"");
    }
    delta["manifest_size"] = im.manifest.samples.size();
    return delta;
}

json PipelineService::manifest(std::string_view task_id_) const {
    if (task_id_ != task_id())
        throw Error(ErrorKind::not_found, "unknown task \"" + std::string(task_id_) + "\"");
    std::lock_guard lock(impl_->manifest_mutex);
    return to_json(impl_->manifest);
}

void PipelineService::wait_idle() {
    std::unique_lock lock(impl_->queue_mutex);
    impl_->idle_cv.wait(lock, [&] { return impl_->queue.empty() && impl_->active == 0; });
}

void PipelineService::mount(httplib::Server& server) {
    auto handle = [](httplib::Response& res, auto&& fn, int ok_status = 200) {
        try {
            json out = fn();
            res.status = ok_status;
            res.set_content(out.dump(), "application/json");
        } catch (const Error& e) {
            res.status = http_status(e.kind());
            res.set_content(wire::error_envelope(to_string(e.kind()), e.what()).dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(wire::error_envelope("internal", e.what()).dump(), "application/json");
        }
    };
    auto parse = [](const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        try {
            return json::parse(req.body);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::validation, std::string("malformed JSON body: ") + e.what());
        }
    };

    server.Post("/sessions", [=, this](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return create_session(parse(req)); }, 201);
    });
    server.Put(R"(/sessions/([^/]+)/mask)", [=, this](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] {
            const json body = parse(req);
            if (!body.contains("mask")) throw Error(ErrorKind::validation, "body needs \"mask\"");
            BitMask mask = [&] {
                try {
                    return wire::decode_mask(body["mask"]);
                } catch (const Error& e) {
                    throw Error(ErrorKind::validation, e.what());
                }
            }();
            return submit_mask(req.matches[1].str(), mask);
        });
    });
    server.Post(R"(/sessions/([^/]+)/generate)", [=, this](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return start_generation(req.matches[1].str()); }, 202);
    });
    server.Get(R"(/jobs/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return get_job(req.matches[1].str()); });
    });
    server.Post(R"(/jobs/([^/]+)/decisions)", [=, this](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return decide(req.matches[1].str(), parse(req)); });
    });
    server.Get(R"(/tasks/([^/]+)/manifest)", [=, this](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return manifest(req.matches[1].str()); });
    });
    if (impl_->cfg.mount_mock_backends) mount_backend_routes(server, make_mock_backends());
}

int PipelineService::bind(const std::string& host, int port) {
    if (!impl_->server) {
        impl_->server = std::make_unique<httplib::Server>();
        mount(*impl_->server);
    }
    if (port == 0) {
        const int bound = impl_->server->bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorKind::io, "cannot bind " + host);
        return bound;
    }
    if (!impl_->server->bind_to_port(host, port))
        throw Error(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void PipelineService::listen() {
    if (!impl_->server) throw Error(ErrorKind::config, "listen() needs bind() first");
    impl_->server->listen_after_bind();
}

void PipelineService::stop() {
    if (impl_->server) impl_->server->stop();
}

} // namespace augment
