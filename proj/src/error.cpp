// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/error.hpp"

namespace augment {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::validation: return "validation";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::transport: return "transport";
    case ErrorKind::remote: return "remote";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::config: return "config";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::io: return "io";
    case ErrorKind::not_found: return "not_found";
    }
    return "unknown";
}

Error Error::with_context(std::string_view context) const {
    std::string msg(context);
    msg += ": ";
    msg += what();
    return Error(kind_, msg);
}

} // namespace augment
