// SPDX-License-Identifier: Apache-2.0
//
// hrs-cluster: user clustering for hierarchical rate splitting
// Copyright (C) 2026 The hrs-cluster authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace hrs
{
    // Error categories map onto the CLI exit codes (see exit_code()).

    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Partition cannot support the requested precoder dimensions
    class FeasibilityError : public ConfigError
    {
    public:
        using ConfigError::ConfigError;
    };

    // Projection of a (numerically) rank-deficient channel block
    class DegenerateInputError : public NumericalError
    {
    public:
        using NumericalError::NumericalError;
    };

    enum class ExitCode : int
    {
        success = 0,
        other = 1,
        config = 2,
        data_format = 3,
        numerical = 4
    };

    inline ExitCode exit_code(const std::exception &e)
    {
        if (dynamic_cast<const ConfigError *>(&e))
            return ExitCode::config;
        if (dynamic_cast<const FormatError *>(&e))
            return ExitCode::data_format;
        if (dynamic_cast<const NumericalError *>(&e))
            return ExitCode::numerical;
        if (dynamic_cast<const std::invalid_argument *>(&e) || dynamic_cast<const std::domain_error *>(&e))
            return ExitCode::config;
        return ExitCode::other;
    }
}
