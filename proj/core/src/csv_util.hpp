// Copyright 2026 The PWSM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Internal CSV helpers shared by the ledger, stream, and benchmark writers.
// Values never contain commas or quotes, so splitting is plain.

#ifndef PWSM_SRC_CSV_UTIL_HPP_
#define PWSM_SRC_CSV_UTIL_HPP_

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pwsm::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line,
                                           char delim = ',') {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

[[noreturn]] inline void fail_line(const std::string& path, std::size_t line,
                                   const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) +
                           ": malformed row: " + what);
}

inline double parse_double(std::string_view field, const std::string& path,
                           std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail_line(path, line, "expected a number, got '" + std::string(field) +
                              "'");
  }
  return value;
}

inline std::int64_t parse_int(std::string_view field, const std::string& path,
                              std::size_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail_line(path, line, "expected an integer, got '" + std::string(field) +
                              "'");
  }
  return value;
}

// Shortest decimal string that round-trips the exact double value.
inline std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw std::runtime_error("failed to format a double");
  }
  return std::string(buffer, ptr);
}

// Reads a whole text file line by line, tracking 1-based line numbers and
// tolerating a final line without a newline.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) {
      throw std::runtime_error("cannot open file: " + path);
    }
  }

  bool next(std::string& line) {
    if (!std::getline(in_, line)) {
      return false;
    }
    ++line_number_;
    return true;
  }

  std::size_t line_number() const { return line_number_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

class FileWriter {
 public:
  explicit FileWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) {
      throw std::runtime_error("cannot open file for writing: " + path);
    }
  }

  void line(const std::string& text) { out_ << text << '\n'; }

  void close() {
    out_.close();
    if (!out_) {
      throw std::runtime_error("failed writing file: " + path_);
    }
  }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace pwsm::csv

#endif  // PWSM_SRC_CSV_UTIL_HPP_
