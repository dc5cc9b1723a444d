// Copyright 2026 The fldeep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace fldeep {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Any failure to load a run bundle. The CLI maps this family to exit code 2.
class BundleError : public Error {
public:
    using Error::Error;
};

class MissingFile : public BundleError {
public:
    explicit MissingFile(std::string name)
        : BundleError("missing file: " + name), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class SchemaViolation : public BundleError {
public:
    SchemaViolation(std::string file, std::string field, std::string reason)
        : BundleError(file + ": field '" + field + "': " + reason),
          file_(std::move(file)),
          field_(std::move(field)),
          reason_(std::move(reason)) {}

    const std::string& file() const noexcept { return file_; }
    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string file_;
    std::string field_;
    std::string reason_;
};

class InvariantViolation : public BundleError {
public:
    using BundleError::BundleError;
};

class EmptyTrace : public Error {
public:
    EmptyTrace() : Error("empty trace") {}
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class LayoutMismatch : public Error {
public:
    using Error::Error;
};

class VersionMismatch : public Error {
public:
    using Error::Error;
};

class CorruptModel : public Error {
public:
    using Error::Error;
};

class UnboundVariable : public Error {
public:
    using Error::Error;
};

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class KeyMissing : public Error {
public:
    explicit KeyMissing(std::string key) : Error("no prior for fault type " + key), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class InapplicableOperator : public Error {
public:
    using Error::Error;
};

class UnknownCategoryMapping : public Error {
public:
    using Error::Error;
};

/// Malformed configuration (rules config, priors table, CLI config file).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fldeep
