// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/wire.hpp"

#include <charconv>

#include "augment/codec.hpp"
#include "augment/error.hpp"

namespace augment::wire {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name))
        throw Error(ErrorKind::protocol, std::string("missing field \"") + name + "\"");
    return j.at(name);
}

const std::string& string_field(const json& j, const char* name) {
    const json& f = field(j, name);
    if (!f.is_string())
        throw Error(ErrorKind::protocol, std::string("field \"") + name + "\" must be a string");
    return f.get_ref<const std::string&>();
}

template <class T>
T decode_payload(const json& f, T (*decoder)(std::span<const std::uint8_t>)) {
    if (!f.is_string()) throw Error(ErrorKind::protocol, "image payload must be a base64 string");
    const auto bytes = base64_decode(f.get_ref<const std::string&>());
    try {
        return decoder(bytes);
    } catch (const Error& e) {
        throw Error(ErrorKind::protocol, std::string("undecodable PNG payload: ") + e.what());
    }
}

int int_field(const json& j, const char* name) {
    const json& f = field(j, name);
    if (!f.is_number_integer())
        throw Error(ErrorKind::protocol, std::string("field \"") + name + "\" must be an integer");
    return f.get<int>();
}

} // namespace

json encode_image(const RasterImage& image) { return base64_encode(encode_png(image)); }
json encode_mask(const BitMask& mask) { return base64_encode(encode_png(mask)); }

RasterImage decode_image(const json& f) { return decode_payload<RasterImage>(f, decode_png_image); }
BitMask decode_mask(const json& f) { return decode_payload<BitMask>(f, decode_png_mask); }

json to_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

Rect rect_from_json(const json& j) {
    return {int_field(j, "x"), int_field(j, "y"), int_field(j, "w"), int_field(j, "h")};
}

json to_json(const InpaintRequest& req) {
    return {{"base_crop", encode_image(req.base_crop)},
            {"mask", encode_mask(req.mask)},
            {"reference", encode_image(req.reference)},
            {"seed", std::to_string(req.seed)}};
}

json to_json(const InpaintResponse& resp) {
    return {{"image", encode_image(resp.image)},
            {"backend_id", resp.backend_id},
            {"latency_ms", resp.latency_ms}};
}

json to_json(const EmbedRequest& req) { return {{"image", encode_image(req.image)}}; }

json to_json(const EmbedResponse& resp) { return {{"vector", resp.vector}}; }

json to_json(const SegmentRequest& req) {
    json j = {{"image", encode_image(req.image)}, {"prompt_box", to_json(req.prompt_box)}};
    j["hint_mask"] = req.hint_mask ? encode_mask(*req.hint_mask) : json(nullptr);
    return j;
}

json to_json(const SegmentResponse& resp) {
    return {{"mask", encode_mask(resp.mask)}, {"confidence", resp.confidence}};
}

InpaintRequest inpaint_request_from_json(const json& j) {
    const std::string& seed_text = string_field(j, "seed");
    std::uint64_t seed = 0;
    const auto [end, ec] =
        std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), seed);
    if (ec != std::errc{} || end != seed_text.data() + seed_text.size())
        throw Error(ErrorKind::protocol, "field \"seed\" must be a decimal uint64 string");
    return {decode_image(field(j, "base_crop")), decode_mask(field(j, "mask")),
            decode_image(field(j, "reference")), seed};
}

InpaintResponse inpaint_response_from_json(const json& j) {
    InpaintResponse resp{decode_image(field(j, "image")), "", 0.0};
    if (j.contains("backend_id") && j["backend_id"].is_string())
        resp.backend_id = j["backend_id"].get<std::string>();
    if (j.contains("latency_ms") && j["latency_ms"].is_number())
        resp.latency_ms = j["latency_ms"].get<double>();
    return resp;
}

EmbedRequest embed_request_from_json(const json& j) { return {decode_image(field(j, "image"))}; }

EmbedResponse embed_response_from_json(const json& j) {
    const json& v = field(j, "vector");
    if (!v.is_array() || v.empty())
        throw Error(ErrorKind::protocol, "field \"vector\" must be a non-empty array");
    EmbedResponse resp;
    resp.vector.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) throw Error(ErrorKind::protocol, "embedding entries must be numbers");
        resp.vector.push_back(x.get<double>());
    }
    return resp;
}

SegmentRequest segment_request_from_json(const json& j) {
    SegmentRequest req{decode_image(field(j, "image")), rect_from_json(field(j, "prompt_box")),
                       std::nullopt};
    if (j.contains("hint_mask") && !j["hint_mask"].is_null())
        req.hint_mask = decode_mask(j["hint_mask"]);
    return req;
}

SegmentResponse segment_response_from_json(const json& j) {
    const json& c = field(j, "confidence");
    if (!c.is_number()) throw Error(ErrorKind::protocol, "field \"confidence\" must be a number");
    return {decode_mask(field(j, "mask")), c.get<double>()};
}

json error_envelope(std::string_view code, std::string_view message) {
    return {{"code", code}, {"message", message}};
}

} // namespace augment::wire
