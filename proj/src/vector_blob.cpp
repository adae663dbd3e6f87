// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/vector_blob.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>

#include "recap/errors.hpp"

namespace recap {

namespace {

void put_u32(std::ostream &out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    }
    out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream &in, const std::filesystem::path &path) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char *>(b.data()), 4);
    if (!in) {
        throw DataError("vector blob '" + path.string() + "' is truncated");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_vector_blob(const std::filesystem::path &path, const std::vector<Vector> &rows) {
    const std::size_t dim = rows.empty() ? 0 : rows.front().size();
    for (const auto &r : rows) {
        if (r.size() != dim) {
            throw InputError("vector blob: ragged rows");
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write vector blob '" + path.string() + "'");
    }
    put_u32(out, static_cast<std::uint32_t>(rows.size()));
    put_u32(out, static_cast<std::uint32_t>(dim));
    for (const auto &r : rows) {
        for (double v : r) {
            put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
    if (!out) {
        throw DataError("failed writing vector blob '" + path.string() + "'");
    }
}

std::vector<Vector> read_vector_blob(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open vector blob '" + path.string() + "'");
    }
    const std::uint32_t rows = get_u32(in, path);
    const std::uint32_t dim = get_u32(in, path);
    std::vector<Vector> out(rows, Vector(dim));
    for (auto &r : out) {
        for (double &v : r) {
            v = static_cast<double>(std::bit_cast<float>(get_u32(in, path)));
        }
    }
    in.peek();
    if (!in.eof()) {
        throw DataError("vector blob '" + path.string() + "' has trailing bytes");
    }
    return out;
}

}  // namespace recap
