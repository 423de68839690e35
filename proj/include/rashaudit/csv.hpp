/*
 * Copyright 2025 The rashaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

namespace rashaudit::csv {

/// Splits CSV text into records of fields: quoted fields with "" escapes,
/// LF or CRLF line endings, completely blank lines skipped. `origin` names
/// the source in error messages.
std::vector<std::vector<std::string>> parse(const std::string& text,
                                            const std::string& origin);

/// Reads and parses a CSV file (FileNotFound if it cannot be opened).
std::vector<std::vector<std::string>> parse_file(const std::string& path);

}  // namespace rashaudit::csv
