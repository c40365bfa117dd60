/*
 * Copyright (c) 2026, The mwmean Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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
#include <vector>

namespace mwmean {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (empty sample,
// zero value under a non-positive exponent, eta outside the natural domain).
class DomainError : public Error {
   public:
    using Error::Error;
};

// A function produced a non-finite value on finite input.
class NumericError : public Error {
   public:
    using Error::Error;
};

// Malformed model, policy, or configuration file.
class ConfigError : public Error {
   public:
    using Error::Error;
};

// Moment target not attainable by the model's mean map.
class NoSolutionError : public Error {
   public:
    NoSolutionError(const std::string& what, std::string attainable)
        : Error(what), attainable_(std::move(attainable)) {}

    const std::string& attainable() const { return attainable_; }

   private:
    std::string attainable_;
};

// Iteration cap reached without meeting the residual tolerance.
class ConvergenceError : public Error {
   public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                     double residual)
        : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const std::vector<double>& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }

   private:
    std::vector<double> last_iterate_;
    double residual_;
};

class SchemaError : public Error {
   public:
    using Error::Error;
};

class AggregationError : public Error {
   public:
    using Error::Error;
};

class IoError : public Error {
   public:
    using Error::Error;
};

}  // namespace mwmean
