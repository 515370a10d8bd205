// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "augment/backend.hpp"

namespace augment::wire {

// JSON bodies for the /v1/inpaint, /v1/embed and /v1/segment routes. Images
// travel as base64 PNG strings; see docs/PROTOCOL.md for the field list.

inline constexpr std::string_view kInpaintRoute = "/v1/inpaint";
inline constexpr std::string_view kEmbedRoute = "/v1/embed";
inline constexpr std::string_view kSegmentRoute = "/v1/segment";

nlohmann::json encode_image(const RasterImage& image);
nlohmann::json encode_mask(const BitMask& mask);
RasterImage decode_image(const nlohmann::json& field);
BitMask decode_mask(const nlohmann::json& field);

nlohmann::json to_json(const Rect& r);
Rect rect_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InpaintRequest& req);
nlohmann::json to_json(const InpaintResponse& resp);
nlohmann::json to_json(const EmbedRequest& req);
nlohmann::json to_json(const EmbedResponse& resp);
nlohmann::json to_json(const SegmentRequest& req);
nlohmann::json to_json(const SegmentResponse& resp);

// Decoders throw Error(protocol) for missing or malformed fields.
InpaintRequest inpaint_request_from_json(const nlohmann::json& j);
InpaintResponse inpaint_response_from_json(const nlohmann::json& j);
EmbedRequest embed_request_from_json(const nlohmann::json& j);
EmbedResponse embed_response_from_json(const nlohmann::json& j);
SegmentRequest segment_request_from_json(const nlohmann::json& j);
SegmentResponse segment_response_from_json(const nlohmann::json& j);

// Error envelope: {"code": ..., "message": ...}
nlohmann::json error_envelope(std::string_view code, std::string_view message);

} // namespace augment::wire
