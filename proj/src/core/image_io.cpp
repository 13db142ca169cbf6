/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/core/image_io.cpp
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
#include "sk13/core/image_io.hpp"
#include "sk13/core/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace sk13 {

namespace {

std::uint8_t quantize(double v)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

struct PngImageGuard
{
    png_image* image;
    ~PngImageGuard() { png_image_free(image); }
};

} // namespace

Image decode_png(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    {
        throw FormatError("PNG: bad signature");
    }
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    PngImageGuard guard{&png};
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()))
    {
        throw FormatError(std::string("PNG: ") + png.message);
    }
    const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const bool alpha = (png.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    png.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB) : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
    const int width = static_cast<int>(png.width);
    const int height = static_cast<int>(png.height);
    if (width <= 0 || height <= 0 || static_cast<long long>(width) * height > (1LL << 28))
    {
        throw FormatError("PNG: unsupported dimensions");
    }
    const int stored = PNG_IMAGE_PIXEL_CHANNELS(png.format);
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, raw.data(), 0, nullptr))
    {
        throw FormatError(std::string("PNG: ") + png.message);
    }

    // Transparent regions become white paper.
    const int channels = color ? 3 : 1;
    Image image(width, height, channels);
    for (std::size_t i = 0; i < image.pixel_count(); ++i)
    {
        const std::uint8_t* px = raw.data() + i * stored;
        const double a = alpha ? px[stored - 1] / 255.0 : 1.0;
        for (int c = 0; c < channels; ++c)
        {
            image.pixels[i * channels + c] = a * (px[c] / 255.0) + (1.0 - a);
        }
    }
    return image;
}

std::vector<std::uint8_t> encode_png(const Image& image)
{
    if (image.empty() || (image.channels != 1 && image.channels != 3))
    {
        throw ValidationError("image", "PNG export needs a non-empty 1- or 3-channel image");
    }
    std::vector<std::uint8_t> raw(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), quantize);

    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width);
    png.height = static_cast<png_uint_32>(image.height);
    png.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    PngImageGuard guard{&png};

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, raw.data(), 0, nullptr))
    {
        throw FormatError(std::string("PNG: ") + png.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, raw.data(), 0, nullptr))
    {
        throw FormatError(std::string("PNG: ") + png.message);
    }
    out.resize(size);
    return out;
}

namespace {

// Netpbm header tokens, skipping '#' comments.
class PgmTokenizer
{
public:
    explicit PgmTokenizer(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    long next_int()
    {
        skip_space();
        long value = 0;
        bool any = false;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]))
        {
            value = value * 10 + (bytes_[pos_++] - '0');
            any = true;
            if (value > 1'000'000'000)
            {
                throw FormatError("PGM: number out of range");
            }
        }
        if (!any)
        {
            throw FormatError("PGM: expected a number");
        }
        return value;
    }

    std::size_t position() const { return pos_; }
    void skip_one() { ++pos_; }

private:
    void skip_space()
    {
        while (pos_ < bytes_.size())
        {
            if (bytes_[pos_] == '#')
            {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                {
                    ++pos_;
                }
            }
            else if (std::isspace(bytes_[pos_]))
            {
                ++pos_;
            }
            else
            {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

} // namespace

Image decode_pgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    {
        throw FormatError("PGM: bad magic");
    }
    const bool binary = bytes[1] == '5';
    PgmTokenizer tokens(bytes);
    const long width = tokens.next_int();
    const long height = tokens.next_int();
    const long maxval = tokens.next_int();
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    {
        throw FormatError("PGM: invalid header");
    }
    Image image(static_cast<int>(width), static_cast<int>(height), 1);
    if (binary)
    {
        tokens.skip_one();
        const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
        const std::size_t start = tokens.position();
        if (bytes.size() < start + image.pixel_count() * sample_bytes)
        {
            throw FormatError("PGM: truncated pixel data");
        }
        for (std::size_t i = 0; i < image.pixel_count(); ++i)
        {
            const std::size_t p = start + i * sample_bytes;
            const unsigned v = sample_bytes == 2 ? (bytes[p] << 8) | bytes[p + 1] : bytes[p];
            image.pixels[i] = static_cast<double>(v) / maxval;
        }
    }
    else
    {
        for (std::size_t i = 0; i < image.pixel_count(); ++i)
        {
            image.pixels[i] = static_cast<double>(std::min(tokens.next_int(), maxval)) / maxval;
        }
    }
    return image;
}

std::vector<std::uint8_t> encode_pgm(const Image& image)
{
    const Image gray = to_grayscale(image);
    const std::string header = "P5\n" + std::to_string(gray.width) + " " + std::to_string(gray.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + gray.pixel_count());
    for (double v : gray.pixels)
    {
        out.push_back(quantize(v));
    }
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw FormatError("cannot open " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw FormatError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
    {
        throw FormatError("short write to " + path.string());
    }
}

Image read_image(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2'))
    {
        return decode_pgm(bytes);
    }
    return decode_png(bytes);
}

void write_image(const Image& image, const std::filesystem::path& path)
{
    if (path.extension() == ".pgm")
    {
        write_file_bytes(path, encode_pgm(image));
    }
    else
    {
        write_file_bytes(path, encode_png(image));
    }
}

} // namespace sk13
