/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/core/image_io.hpp
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

#ifndef SK13_CORE_IMAGE_IO_HPP
#define SK13_CORE_IMAGE_IO_HPP

#include "sk13/core/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sk13 {

/**
 * Decodes an 8- or 16-bit PNG (gray, gray+alpha, RGB or RGBA) into an Image with
 * samples in [0, 1]. Alpha is dropped. Throws FormatError on undecodable input.
 */
Image decode_png(std::span<const std::uint8_t> bytes);

/// Encodes a 1- or 3-channel image as an 8-bit PNG. Samples are clamped and rounded.
std::vector<std::uint8_t> encode_png(const Image& image);

/// Binary (P5) or ASCII (P2) PGM with maxval up to 65535.
Image decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const Image& image);

/// Reads a PNG or PGM file, detected from the leading magic bytes.
Image read_image(const std::filesystem::path& path);

/// Writes PNG unless the extension is `.pgm`.
void write_image(const Image& image, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace sk13

#endif // SK13_CORE_IMAGE_IO_HPP
