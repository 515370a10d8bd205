// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace augment {

enum class ErrorKind {
    geometry,
    validation,
    protocol,
    transport,
    remote,
    numeric,
    config,
    overflow,
    io,
    not_found,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library is an Error; the kind drives the C API
// status code and lets callers branch without string matching.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Same kind, message prefixed with "<context>: ".
    Error with_context(std::string_view context) const;

  private:
    ErrorKind kind_;
};

} // namespace augment
