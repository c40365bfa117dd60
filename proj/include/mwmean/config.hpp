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

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mwmean {

// Flat "key = value" settings. Blank lines and lines starting with '#' are
// ignored; keys and values are trimmed. Later keys override earlier ones.
class KeyValueConfig {
   public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::filesystem::path& path);

    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

   private:
    std::map<std::string, std::string> entries_;
};

std::string trim(std::string_view s);

// Comma separated list of doubles ("1, 2.5,3").
std::vector<double> parse_double_list(std::string_view text);

double parse_double(std::string_view text);

}  // namespace mwmean
