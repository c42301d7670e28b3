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

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hrli::detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            if (pos < text.size()) out.push_back(text.substr(pos));
            break;
        }
        out.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return out;
}

/// Splits off the first whitespace-delimited token; `rest` receives the remainder (untrimmed).
inline std::string_view next_token(std::string_view s, std::string_view& rest)
{
    s = trim(s);
    auto sp = s.find_first_of(" \t");
    if (sp == std::string_view::npos) {
        rest = {};
        return s;
    }
    rest = s.substr(sp + 1);
    return s.substr(0, sp);
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::string_view rest = s;
    while (true) {
        auto tok = next_token(rest, rest);
        if (tok.empty()) break;
        out.push_back(tok);
    }
    return out;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s)
{
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!head(s[0])) return false;
    for (char c : s)
        if (!head(c) && !(c >= '0' && c <= '9')) return false;
    return true;
}

} // namespace hrli::detail
