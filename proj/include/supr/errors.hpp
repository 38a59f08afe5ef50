/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/errors.hpp
 *
 * Copyright 2026 The supr authors
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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace supr {

/// Coarse error categories, also used by the CLI for machine-parsable exit
/// diagnostics ("error: category=<name>: <message>").
enum class ErrorCategory {
    invalid_argument,
    invalid_model,
    io,
    numerical,
    unsupported,
};

inline const char* to_string(ErrorCategory c)
{
    switch (c)
    {
    case ErrorCategory::invalid_argument: return "invalid-argument";
    case ErrorCategory::invalid_model: return "invalid-model";
    case ErrorCategory::io: return "io";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::unsupported: return "unsupported";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Bad caller input: wrong dimensions, non-finite values, out-of-range indices.
class InvalidArgumentError : public Error
{
public:
    explicit InvalidArgumentError(const std::string& message)
        : Error(ErrorCategory::invalid_argument, message)
    {
    }
};

/// A model container violates an invariant (either at load or when an
/// operation such as part separation detects an inconsistency).
class ModelError : public Error
{
public:
    explicit ModelError(const std::string& message) : Error(ErrorCategory::invalid_model, message)
    {
    }
};

/// Requested feature not present (e.g. foot deformation on a container
/// without foot networks) or refused by a scale guard.
class UnsupportedError : public Error
{
public:
    explicit UnsupportedError(const std::string& message)
        : Error(ErrorCategory::unsupported, message)
    {
    }
};

/// Optimization diverged. Carries the objective trace up to the failure.
class NumericalError : public Error
{
public:
    NumericalError(const std::string& message, std::vector<double> objective_trace)
        : Error(ErrorCategory::numerical, message), trace_(std::move(objective_trace))
    {
    }

    const std::vector<double>& objective_trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// What went wrong while reading a model container file. Each corruption mode
/// maps to exactly one kind so tests and tooling can tell them apart.
enum class LoadErrorKind {
    bad_magic,
    version_mismatch,
    truncated,
    checksum_mismatch,
    bad_manifest,
    bad_layout,
};

inline const char* to_string(LoadErrorKind k)
{
    switch (k)
    {
    case LoadErrorKind::bad_magic: return "bad-magic";
    case LoadErrorKind::version_mismatch: return "version-mismatch";
    case LoadErrorKind::truncated: return "truncated";
    case LoadErrorKind::checksum_mismatch: return "checksum-mismatch";
    case LoadErrorKind::bad_manifest: return "bad-manifest";
    case LoadErrorKind::bad_layout: return "bad-layout";
    }
    return "unknown";
}

class LoadError : public Error
{
public:
    LoadError(LoadErrorKind kind, const std::string& message)
        : Error(ErrorCategory::io, std::string(to_string(kind)) + ": " + message), kind_(kind)
    {
    }

    LoadErrorKind kind() const noexcept { return kind_; }

private:
    LoadErrorKind kind_;
};

/// Mesh file syntax error with a line (text formats) or byte offset (binary).
class ParseError : public Error
{
public:
    ParseError(const std::string& message, std::size_t line, std::size_t byte_offset = 0)
        : Error(ErrorCategory::io, message + " (line " + std::to_string(line) + ")"),
          line_(line),
          byte_offset_(byte_offset)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t line_;
    std::size_t byte_offset_;
};

} // namespace supr
