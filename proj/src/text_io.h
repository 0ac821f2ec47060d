// Copyright 2026 The scoreaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small delimited-text helpers shared by the readers and writers.

#ifndef SCOREAUDIT_SRC_TEXT_IO_H_
#define SCOREAUDIT_SRC_TEXT_IO_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace scoreaudit::text {

// Splits on ',' and trims ASCII whitespace from each field.
std::vector<std::string_view> SplitFields(std::string_view line);

// Reads one line, dropping a trailing '\r'. Returns false at end of stream.
bool ReadLine(std::istream& in, std::string& line);

bool IsBlank(std::string_view line);

// Parses the whole field as a double; std::nullopt on any trailing garbage.
// Non-finite spellings ("nan", "inf") parse successfully.
std::optional<double> ParseDouble(std::string_view field);

// Shortest representation that round-trips exactly.
std::string FormatDouble(double value);

// Position of `name` in `header`, or std::nullopt.
std::optional<std::size_t> FindColumn(const std::vector<std::string_view>& header,
                                      std::string_view name);

}  // namespace scoreaudit::text

#endif  // SCOREAUDIT_SRC_TEXT_IO_H_
