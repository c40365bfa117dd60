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

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "mwmean/config.hpp"
#include "mwmean/expfam.hpp"

namespace mwmean {

// One candidate line of a statewide returns file.
struct ReturnsRow {
    int year = 0;
    std::string state;
    std::string party;
    std::int64_t candidate_votes = 0;
    std::int64_t total_votes = 0;

    bool operator==(const ReturnsRow&) const = default;
};

// Column names default to the MIT Election Lab senate file.
struct SchemaConfig {
    std::string year_column = "year";
    std::string state_column = "state_po";
    std::string party_column = "party_simplified";
    std::string candidate_votes_column = "candidatevotes";
    std::string total_votes_column = "totalvotes";
    int year_min = 1976;
    int year_max = 2020;
};

enum class Party { dem, rep, other };

// Party label -> category. Labels are matched case-insensitively after
// trimming; anything unlisted (including blanks and write-ins) is OTHER.
class PartyMapping {
   public:
    static PartyMapping defaults();

    void assign(const std::string& label, Party party);
    Party map(std::string_view label) const;

   private:
    std::map<std::string, Party> labels_;
};

// Schema and party mapping read from one key=value file:
//   year_column, state_column, party_column, candidate_votes_column,
//   total_votes_column, year_min, year_max, party.<LABEL> = dem|rep|other
struct PipelineConfig {
    SchemaConfig schema;
    PartyMapping mapping = PartyMapping::defaults();

    static PipelineConfig from(const KeyValueConfig& cfg);
};

struct RejectedRow {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct LoadResult {
    std::vector<ReturnsRow> rows;
    std::vector<RejectedRow> rejects;
};

// Delimited text with a header row; comma or tab chosen from the header.
// Fields may be double-quoted. Throws SchemaError on a missing column and
// IoError when the file cannot be read.
LoadResult load_returns(const std::filesystem::path& path, const SchemaConfig& schema = {});
LoadResult parse_returns(std::istream& in, const SchemaConfig& schema = {});

// One row per election cycle with (dem, rep, other) vote shares.
struct ProportionMatrix {
    std::vector<int> years;
    Matrix shares;  // n x 3
    std::vector<std::string> warnings;
};

inline constexpr double kShareFloor = 1e-9;

// Sums candidate votes per cycle year (odd years join the following even
// cycle) and party category, then divides by the cycle's summed total.
// Zero shares are floored at kShareFloor and the row renormalized.
ProportionMatrix aggregate(const std::vector<ReturnsRow>& rows, const PartyMapping& mapping);

// Header "year,dem,rep,other", 12 significant digits.
std::string to_csv(const ProportionMatrix& m);
ProportionMatrix parse_proportions_csv(std::istream& in);

WeightedDataset to_weighted_dataset(const ProportionMatrix& m);

// Splits one delimited line honouring double quotes ("" is a literal quote).
std::vector<std::string> split_delimited(std::string_view line, char delim);

}  // namespace mwmean
