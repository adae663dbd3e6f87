// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "recap/backends.hpp"

namespace recap {

/// Connects to a backend server speaking the JSON protocol of BackendServer.
/// `url` looks like "http://127.0.0.1:8080". Transport failures raise DataError;
/// InputError and ConfigError raised by the server are rethrown with their type.
BackendSuite make_remote_backends(const std::string &url);

/// Serves a BackendSuite over HTTP so that out-of-process model code can be
/// swapped in behind the same interfaces.
class BackendServer {
  public:
    explicit BackendServer(BackendSuite backends);
    ~BackendServer();
    BackendServer(const BackendServer &) = delete;
    BackendServer &operator=(const BackendServer &) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port.
    int start(const std::string &host = "127.0.0.1", int port = 0);
    /// Blocks serving on the calling thread.
    void listen(const std::string &host, int port);
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace recap
