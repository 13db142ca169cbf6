/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/core/binary_format.hpp
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
#pragma once

#ifndef SK13_CORE_BINARY_FORMAT_HPP
#define SK13_CORE_BINARY_FORMAT_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sk13 {

/**
 * Little-endian writer for the SK13 container: 8 magic bytes, u32 version, the
 * caller's fields, and a trailing CRC32 over every preceding byte.
 */
class ByteWriter
{
public:
    ByteWriter(std::string_view magic, std::uint32_t version);

    void put_u32(std::uint32_t value);
    void put_f32(float value);

    /// Appends the CRC and hands over the buffer.
    std::vector<std::uint8_t> finish() &&;

private:
    std::vector<std::uint8_t> bytes_;
};

/**
 * Reader for the SK13 container. The constructor checks magic, version and CRC,
 * so a reader that exists is reading an intact payload. Every accessor throws
 * FormatError when it would run past the payload end.
 */
class ByteReader
{
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string_view magic, std::uint32_t version);

    std::uint32_t get_u32();
    float get_f32();

    /// Bytes left before the CRC.
    std::size_t remaining() const noexcept { return end_ - pos_; }

private:
    void require(std::size_t count) const;

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

} // namespace sk13

#endif // SK13_CORE_BINARY_FORMAT_HPP
