/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/dataset/manifest.hpp
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

#ifndef SK13_DATASET_MANIFEST_HPP
#define SK13_DATASET_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sk13 {
namespace dataset {

enum class Source
{
    photo_derived,
    model_derived
};

std::string to_string(Source source);

struct ManifestEntry
{
    std::filesystem::path sketch_path;
    std::filesystem::path landmarks_path;
    std::optional<std::filesystem::path> params_path;
    Source source = Source::model_derived;
    std::uint64_t seed = 0;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest
{
    std::vector<ManifestEntry> entries;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/**
 * One record per line, tab-separated: sketch path, landmarks path, params path ("-" when
 * absent), source ("photo-derived" or "model-derived") and seed. Lines starting with '#'
 * are comments; the writer emits a header comment naming the columns. Paths may not
 * contain tabs or newlines.
 */
std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(const std::string& text);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/**
 * Checks that every referenced file exists and every landmark file parses to 68 points.
 * Relative paths resolve against `base`. Throws ValidationError naming the path.
 */
void validate_manifest(const DatasetManifest& manifest, const std::filesystem::path& base = {});

} // namespace dataset
} // namespace sk13

#endif // SK13_DATASET_MANIFEST_HPP
