// Copyright 2026 The corp Authors
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

// Readers and writers for the two input formats:
//   CSV   header "x,y", one point forecast and outcome per line
//   JSONL {"dist": {...}, "y": number} per line

#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "corp/errors.hpp"
#include "corp/serialize.hpp"
#include "corp/synthetic.hpp"

namespace corp {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

inline double parse_field(std::string_view token, std::size_t line) {
  token = trim(token);
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line_prefix(line) + "invalid number '" + std::string(token) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line_prefix(line) + "non-finite value");
  return v;
}

}  // namespace detail

/// Reads the CSV point format. Blank lines are skipped.
inline XYData read_csv(std::istream& in) {
  XYData data;
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = detail::trim(raw);
    if (line == 1 && s.starts_with("\xEF\xBB\xBF")) s = detail::trim(s.substr(3));
    if (s.empty()) continue;
    if (!header) {
      if (s.front() == '{') {
        throw ParseError(detail::line_prefix(line) + "JSON record in CSV input");
      }
      const auto cols = detail::split(s, ',');
      if (cols.size() != 2 || detail::trim(cols[0]) != "x" || detail::trim(cols[1]) != "y") {
        throw ParseError(detail::line_prefix(line) + "expected header 'x,y'");
      }
      header = true;
      continue;
    }
    const auto cols = detail::split(s, ',');
    if (cols.size() != 2) {
      throw ParseError(detail::line_prefix(line) + "expected 2 fields, got " +
                       std::to_string(cols.size()));
    }
    data.x.push_back(detail::parse_field(cols[0], line));
    data.y.push_back(detail::parse_field(cols[1], line));
  }
  if (!header) throw ParseError("empty CSV input: expected header 'x,y'");
  if (data.x.empty()) throw ParseError("CSV input has no data rows");
  return data;
}

inline void write_csv(std::ostream& out, const XYData& data) {
  out << "x,y\n";
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    out << detail::format_number(data.x[i]) << ',' << detail::format_number(data.y[i]) << '\n';
  }
}

/// Reads the JSONL distributional format. Blank lines are skipped.
inline std::vector<ForecastCase> read_jsonl(std::istream& in) {
  std::vector<ForecastCase> cases;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = detail::trim(raw);
    if (s.empty()) continue;
    if (s.front() != '{') throw ParseError(detail::line_prefix(line) + "expected a JSON object");
    Json rec;
    try {
      rec = Json::parse(s);
    } catch (const Json::parse_error& e) {
      throw ParseError(detail::line_prefix(line) + "malformed JSON: " + e.what());
    }
    try {
      const auto dist = rec.find("dist");
      if (dist == rec.end()) throw ParseError("missing field 'dist'");
      const double y = detail::json_number(rec, "y");
      if (!std::isfinite(y)) throw ParseError("non-finite outcome");
      cases.push_back({distribution_from_json(*dist), y});
    } catch (const ParseError& e) {
      throw ParseError(detail::line_prefix(line) + e.what());
    } catch (const DomainError& e) {
      throw DomainError(detail::line_prefix(line) + e.what());
    }
  }
  if (cases.empty()) throw ParseError("JSONL input has no records");
  return cases;
}

inline void write_jsonl(std::ostream& out, const std::vector<ForecastCase>& cases) {
  for (const ForecastCase& c : cases) {
    Json rec;
    rec["dist"] = to_json(c.forecast);
    rec["y"] = c.y;
    out << rec.dump() << '\n';
  }
}

}  // namespace corp
