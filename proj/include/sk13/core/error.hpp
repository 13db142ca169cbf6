/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/core/error.hpp
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

#ifndef SK13_CORE_ERROR_HPP
#define SK13_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sk13 {

/**
 * Base class of all errors raised by the library.
 *
 * The subclasses map onto the exit codes of the command line tool: configuration
 * and validation problems are the caller's fault (exit 1), format and
 * optimization problems are runtime failures (exit 2).
 */
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Dimensions or settings that do not fit together.
class ConfigurationError : public Error
{
public:
    using Error::Error;
};

/// A value violates a documented invariant. `field()` names the offender when known.
class ValidationError : public Error
{
public:
    explicit ValidationError(const std::string& message) : Error(message) {}
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed file or byte stream.
class FormatError : public Error
{
public:
    using Error::Error;
};

/// The optimizer hit a non-finite value.
class OptimizationError : public Error
{
public:
    using Error::Error;
};

} // namespace sk13

#endif // SK13_CORE_ERROR_HPP
