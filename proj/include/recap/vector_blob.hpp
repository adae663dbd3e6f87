// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "recap/embedding.hpp"

namespace recap {

/// Length-prefixed little-endian float32 matrix:
///   u32 rows | u32 dim | rows * dim float32
/// Used for per-video frame embeddings and persisted corpus indices.
void write_vector_blob(const std::filesystem::path &path, const std::vector<Vector> &rows);

/// Throws DataError on a missing, truncated or malformed file.
std::vector<Vector> read_vector_blob(const std::filesystem::path &path);

}  // namespace recap
