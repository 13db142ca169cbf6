/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/core/binary_format.cpp
 *
 * Copyright 2026 The sk13 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "sk13/core/binary_format.hpp"
#include "sk13/core/error.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <string>

namespace sk13 {

namespace {

constexpr std::size_t magic_size = 8;
constexpr std::size_t header_size = magic_size + 4;
constexpr std::size_t crc_size = 4;

std::uint32_t read_le_u32(const std::uint8_t* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

} // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks to stay safe on huge assets.
    constexpr std::size_t chunk = 1u << 30;
    for (std::size_t offset = 0; offset < bytes.size(); offset += chunk)
    {
        const std::size_t n = std::min(chunk, bytes.size() - offset);
        crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(n));
    }
    return static_cast<std::uint32_t>(crc);
}

ByteWriter::ByteWriter(std::string_view magic, std::uint32_t version)
{
    if (magic.size() != magic_size)
    {
        throw ConfigurationError("container magic must be 8 bytes");
    }
    bytes_.assign(magic.begin(), magic.end());
    put_u32(version);
}

void ByteWriter::put_u32(std::uint32_t value)
{
    for (int i = 0; i < 4; ++i)
    {
        bytes_.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFFu));
    }
}

void ByteWriter::put_f32(float value)
{
    put_u32(std::bit_cast<std::uint32_t>(value));
}

std::vector<std::uint8_t> ByteWriter::finish() &&
{
    const std::uint32_t crc = crc32_of(bytes_);
    put_u32(crc);
    return std::move(bytes_);
}

ByteReader::ByteReader(std::span<const std::uint8_t> bytes, std::string_view magic, std::uint32_t version)
    : bytes_(bytes)
{
    if (bytes.size() < header_size + crc_size)
    {
        throw FormatError("file too short for an SK13 container");
    }
    if (std::memcmp(bytes.data(), magic.data(), magic_size) != 0)
    {
        throw FormatError("bad magic, expected " + std::string(magic));
    }
    const std::uint32_t found_version = read_le_u32(bytes.data() + magic_size);
    if (found_version != version)
    {
        throw FormatError("unsupported version " + std::to_string(found_version));
    }
    end_ = bytes.size() - crc_size;
    const std::uint32_t stored = read_le_u32(bytes.data() + end_);
    if (stored != crc32_of(bytes.first(end_)))
    {
        throw FormatError("CRC mismatch (file truncated or corrupted)");
    }
    pos_ = header_size;
}

void ByteReader::require(std::size_t count) const
{
    if (pos_ + count > end_)
    {
        throw FormatError("unexpected end of payload");
    }
}

std::uint32_t ByteReader::get_u32()
{
    require(4);
    const std::uint32_t v = read_le_u32(bytes_.data() + pos_);
    pos_ += 4;
    return v;
}

float ByteReader::get_f32()
{
    return std::bit_cast<float>(get_u32());
}

} // namespace sk13
