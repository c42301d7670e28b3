/*
 * Copyright 2026 The hrli Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hrli {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration, layout, or command-line input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A generator or product construction hit its state/vertex cap.
class CapacityError : public Error {
public:
    CapacityError(const std::string& what, std::size_t cap)
        : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// Unknown state, vertex, edge, or session id.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Text could not be parsed; carries a 0-based character offset (or line number for
/// line-oriented documents, see `line()`).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position, std::size_t line = 0)
        : Error(what), position_(position), line_(line) {}
    std::size_t position() const noexcept { return position_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t position_;
    std::size_t line_;
};

/// Formula uses an operator outside the safety/recurrence fragment.
class UnsupportedFragment : public Error {
public:
    UnsupportedFragment(const std::string& op, const std::string& detail)
        : Error("unsupported fragment: operator '" + op + "' " + detail), op_(op) {}
    const std::string& op() const noexcept { return op_; }

private:
    std::string op_;
};

/// Monitor or game uses colors other than 1 and 2.
class UnsupportedColor : public Error {
public:
    using Error::Error;
};

/// A monitor document does not define a successor for some (state, label) pair.
class TotalityError : public Error {
public:
    using Error::Error;
};

/// Synthesis could not produce templates for the requested game.
class SynthesisError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed; the message names the path.
class IoError : public Error {
public:
    IoError(const std::string& what, std::string path) : Error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Brute-force checker input exceeds its configured bound.
class BoundExceeded : public Error {
public:
    using Error::Error;
};

} // namespace hrli
