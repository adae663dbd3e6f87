// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace recap {

/// Malformed or out-of-contract input data (empty frame lists, empty texts, ...).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent configuration: dimension mismatches, invalid hyperparameters.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Files on disk are missing, unreadable or inconsistent.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace recap
