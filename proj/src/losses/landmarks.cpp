/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/losses/landmarks.cpp
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
#include "sk13/losses/landmarks.hpp"
#include "sk13/core/error.hpp"
#include "sk13/core/image_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace sk13 {
namespace losses {

Eigen::VectorXd default_landmark_weights()
{
    Eigen::VectorXd w = Eigen::VectorXd::Ones(landmark_count);
    for (int i = 0; i <= 16; ++i)
    {
        w[i] = 3.0;
    }
    for (int i = 60; i <= 67; ++i)
    {
        w[i] = 3.0;
    }
    for (int i : {31, 35, 48, 54})
    {
        w[i] = 1.5;
    }
    return w;
}

LandmarkSet::LandmarkSet() : weights(default_landmark_weights()) {}

LandmarkSet::LandmarkSet(Eigen::Matrix2Xd points) : points(std::move(points)), weights(default_landmark_weights())
{
    validate();
}

void LandmarkSet::validate() const
{
    if (points.cols() != landmark_count)
    {
        throw ValidationError("landmarks", "expected 68 points, found " + std::to_string(points.cols()));
    }
    if (weights.size() != landmark_count)
    {
        throw ValidationError("landmark weights", "expected 68 weights, found " + std::to_string(weights.size()));
    }
    if (!points.allFinite())
    {
        throw ValidationError("landmarks", "coordinates must be finite");
    }
    if (!(weights.array() > 0.0).all())
    {
        throw ValidationError("landmark weights", "must be positive");
    }
}

PairSpec PairSpec::standard()
{
    PairSpec spec;
    spec.eye_pairs = {{37, 41}, {38, 40}, {43, 47}, {44, 46}, {36, 39}, {42, 45}};
    spec.mouth_pairs = {{61, 67}, {62, 66}, {63, 65}, {60, 64}};
    for (int i = 0; i < 16; ++i)
    {
        spec.contour_pairs.emplace_back(i, i + 1);
    }
    spec.contour_pairs.emplace_back(0, 16);
    spec.contour_pairs.emplace_back(4, 12);
    return spec;
}

void PairSpec::validate() const
{
    auto check = [](const std::vector<IndexPair>& pairs, const char* field) {
        for (const auto& [i, j] : pairs)
        {
            if (i < 0 || i >= landmark_count || j < 0 || j >= landmark_count)
            {
                throw ValidationError(field, "index pair (" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") out of range");
            }
            if (i == j)
            {
                throw ValidationError(field, "pair joins landmark " + std::to_string(i) + " to itself");
            }
        }
    };
    check(eye_pairs, "eye_pairs");
    check(mouth_pairs, "mouth_pairs");
    check(contour_pairs, "contour_pairs");
}

void LossWeights::validate() const
{
    for (double w : {eye_pairs, mouth_pairs, contour_pairs, photometric, regularization})
    {
        if (!(w >= 0.0) || !std::isfinite(w))
        {
            throw ValidationError("loss_weights", "weights must be finite and non-negative");
        }
    }
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view field, int line)
{
    field = trim(field);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || !std::isfinite(value))
    {
        throw ValidationError("landmarks", "line " + std::to_string(line) + ": cannot parse '" +
                                               std::string(field) + "' as a number");
    }
    return value;
}

} // namespace

LandmarkSet parse_landmarks_csv(std::string_view text)
{
    std::vector<Eigen::Vector2d> rows;
    int line_number = 0;
    while (!text.empty())
    {
        const auto newline = text.find('\n');
        std::string_view line = trim(text.substr(0, newline));
        text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
        ++line_number;
        if (line.empty())
        {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
        {
            throw ValidationError("landmarks", "line " + std::to_string(line_number) + ": expected 'x,y'");
        }
        rows.emplace_back(parse_number(line.substr(0, comma), line_number),
                          parse_number(line.substr(comma + 1), line_number));
    }
    if (rows.size() != landmark_count)
    {
        throw ValidationError("landmarks", "expected 68 landmark rows, found " + std::to_string(rows.size()));
    }
    Eigen::Matrix2Xd points(2, landmark_count);
    for (int i = 0; i < landmark_count; ++i)
    {
        points.col(i) = rows[i];
    }
    return LandmarkSet(std::move(points));
}

std::string format_landmarks_csv(const LandmarkSet& landmarks)
{
    std::string out;
    char line[96];
    for (Eigen::Index i = 0; i < landmarks.points.cols(); ++i)
    {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", landmarks.points(0, i), landmarks.points(1, i));
        out += line;
    }
    return out;
}

LandmarkSet read_landmarks_csv(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    return parse_landmarks_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_landmarks_csv(const LandmarkSet& landmarks, const std::filesystem::path& path)
{
    const std::string text = format_landmarks_csv(landmarks);
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace losses
} // namespace sk13
