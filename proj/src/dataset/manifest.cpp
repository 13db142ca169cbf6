/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: src/dataset/manifest.cpp
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
#include "sk13/dataset/manifest.hpp"
#include "sk13/core/error.hpp"
#include "sk13/losses/landmarks.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sk13 {
namespace dataset {

namespace {

constexpr const char* header = "# sketch\tlandmarks\tparams\tsource\tseed";

void check_path(const std::filesystem::path& p, const char* field)
{
    const std::string s = p.string();
    if (s.empty() || s == "-" || s.find_first_of("\t\r\n") != std::string::npos || s.front() == '#')
    {
        throw ValidationError(field, "path '" + s + "' cannot be stored in a manifest");
    }
}

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos)
        {
            return fields;
        }
        start = tab + 1;
    }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base)
{
    return p.is_absolute() || base.empty() ? p : base / p;
}

} // namespace

std::string to_string(Source source)
{
    return source == Source::photo_derived ? "photo-derived" : "model-derived";
}

std::string format_manifest(const DatasetManifest& manifest)
{
    std::ostringstream out;
    out << header << '\n';
    for (const ManifestEntry& e : manifest.entries)
    {
        check_path(e.sketch_path, "sketch");
        check_path(e.landmarks_path, "landmarks");
        if (e.params_path)
        {
            check_path(*e.params_path, "params");
        }
        out << e.sketch_path.string() << '\t' << e.landmarks_path.string() << '\t'
            << (e.params_path ? e.params_path->string() : "-") << '\t' << to_string(e.source) << '\t' << e.seed
            << '\n';
    }
    return out.str();
}

DatasetManifest parse_manifest(const std::string& text)
{
    DatasetManifest manifest;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#')
        {
            continue;
        }
        const auto where = [&](const std::string& field) {
            return "manifest line " + std::to_string(line_no) + ", field " + field + ": ";
        };
        const std::vector<std::string> f = split_tabs(line);
        if (f.size() != 5)
        {
            throw FormatError("manifest line " + std::to_string(line_no) + ": expected 5 tab-separated fields, found " +
                              std::to_string(f.size()));
        }
        ManifestEntry e;
        if (f[0].empty() || f[1].empty() || f[2].empty())
        {
            throw FormatError(where(f[0].empty() ? "sketch" : (f[1].empty() ? "landmarks" : "params")) +
                              "empty path");
        }
        e.sketch_path = f[0];
        e.landmarks_path = f[1];
        if (f[2] != "-")
        {
            e.params_path = f[2];
        }
        if (f[3] == "photo-derived")
        {
            e.source = Source::photo_derived;
        }
        else if (f[3] == "model-derived")
        {
            e.source = Source::model_derived;
        }
        else
        {
            throw FormatError(where("source") + "unknown source '" + f[3] + "'");
        }
        const char* first = f[4].data();
        const char* last = first + f[4].size();
        const auto [ptr, ec] = std::from_chars(first, last, e.seed);
        if (ec != std::errc() || ptr != last || f[4].empty())
        {
            throw FormatError(where("seed") + "not an unsigned integer: '" + f[4] + "'");
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path)
{
    const std::string text = format_manifest(manifest);
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out)
    {
        throw Error("failed to write " + path.string());
    }
}

DatasetManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_manifest(buffer.str());
}

void validate_manifest(const DatasetManifest& manifest, const std::filesystem::path& base)
{
    for (const ManifestEntry& e : manifest.entries)
    {
        const auto require = [&](const std::filesystem::path& p, const char* field) {
            const std::filesystem::path full = resolve(p, base);
            if (!std::filesystem::is_regular_file(full))
            {
                throw ValidationError(field, "missing file " + full.string());
            }
            return full;
        };
        require(e.sketch_path, "sketch");
        const std::filesystem::path lm = require(e.landmarks_path, "landmarks");
        if (e.params_path)
        {
            require(*e.params_path, "params");
        }
        try
        {
            losses::read_landmarks_csv(lm);
        }
        catch (const ValidationError& err)
        {
            throw ValidationError("landmarks", lm.string() + ": " + err.what());
        }
    }
}

} // namespace dataset
} // namespace sk13
