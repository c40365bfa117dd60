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
#include "mwmean/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mwmean/error.hpp"
#include "mwmean/numeric.hpp"

namespace mwmean {

namespace {

std::string upper(std::string_view s) {
    std::string out = trim(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool parse_int(std::string_view text, std::int64_t& out) {
    const std::string t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec == std::errc() && ptr == t.data() + t.size() && !t.empty()) return true;
    // Some exports write integral counts as "123.0".
    double d = 0.0;
    auto [p2, e2] = std::from_chars(t.data(), t.data() + t.size(), d);
    if (e2 != std::errc() || p2 != t.data() + t.size() || t.empty()) return false;
    if (d != std::floor(d) || std::abs(d) > 9e15) return false;
    out = static_cast<std::int64_t>(d);
    return true;
}

std::string fmt12(double x) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 12);
    return std::string(buf, end);
}

Party parse_party(const std::string& v) {
    const std::string u = upper(v);
    if (u == "DEM") return Party::dem;
    if (u == "REP") return Party::rep;
    if (u == "OTHER") return Party::other;
    throw ConfigError("party category must be dem, rep or other, got '" + v + "'");
}

}  // namespace

std::vector<std::string> split_delimited(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

PartyMapping PartyMapping::defaults() {
    PartyMapping m;
    m.assign("DEMOCRAT", Party::dem);
    m.assign("REPUBLICAN", Party::rep);
    return m;
}

void PartyMapping::assign(const std::string& label, Party party) { labels_[upper(label)] = party; }

Party PartyMapping::map(std::string_view label) const {
    const auto it = labels_.find(upper(label));
    return it == labels_.end() ? Party::other : it->second;
}

PipelineConfig PipelineConfig::from(const KeyValueConfig& cfg) {
    PipelineConfig pc;
    auto& s = pc.schema;
    for (const auto& [key, value] : cfg.entries()) {
        if (key == "year_column") s.year_column = value;
        else if (key == "state_column") s.state_column = value;
        else if (key == "party_column") s.party_column = value;
        else if (key == "candidate_votes_column") s.candidate_votes_column = value;
        else if (key == "total_votes_column") s.total_votes_column = value;
        else if (key == "year_min") s.year_min = static_cast<int>(parse_double(value));
        else if (key == "year_max") s.year_max = static_cast<int>(parse_double(value));
        else if (key.rfind("party.", 0) == 0) pc.mapping.assign(key.substr(6), parse_party(value));
    }
    if (s.year_min > s.year_max) throw ConfigError("year_min exceeds year_max");
    return pc;
}

LoadResult parse_returns(std::istream& in, const SchemaConfig& schema) {
    LoadResult out;
    std::string header;
    if (!std::getline(in, header)) throw SchemaError("returns file has no header row");
    if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
    const auto names = split_delimited(header, delim);
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (trim(names[i]) == name) return i;
        }
        throw SchemaError("required column '" + name + "' is missing from the header");
    };
    const std::size_t c_year = column(schema.year_column);
    const std::size_t c_state = column(schema.state_column);
    const std::size_t c_party = column(schema.party_column);
    const std::size_t c_cand = column(schema.candidate_votes_column);
    const std::size_t c_total = column(schema.total_votes_column);

    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = split_delimited(line, delim);
        auto reject = [&](std::string why) { out.rejects.push_back({lineno, std::move(why)}); };
        if (f.size() != names.size()) {
            reject("expected " + std::to_string(names.size()) + " fields, found " + std::to_string(f.size()));
            continue;
        }
        std::int64_t year = 0, cand = 0, total = 0;
        if (!parse_int(f[c_year], year)) {
            reject("unparseable year '" + f[c_year] + "'");
            continue;
        }
        if (!parse_int(f[c_cand], cand) || cand < 0) {
            reject("invalid candidate votes '" + f[c_cand] + "'");
            continue;
        }
        if (!parse_int(f[c_total], total) || total <= 0) {
            reject("invalid total votes '" + f[c_total] + "'");
            continue;
        }
        if (cand > total) {
            reject("candidate votes " + std::to_string(cand) + " exceed total votes " + std::to_string(total));
            continue;
        }
        if (year < schema.year_min || year > schema.year_max) {
            reject("year " + std::to_string(year) + " outside [" + std::to_string(schema.year_min) + ", " +
                   std::to_string(schema.year_max) + "]");
            continue;
        }
        out.rows.push_back({static_cast<int>(year), trim(f[c_state]), trim(f[c_party]), cand, total});
    }
    return out;
}

LoadResult load_returns(const std::filesystem::path& path, const SchemaConfig& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open returns file " + path.string());
    LoadResult r = parse_returns(in, schema);
    if (in.bad()) throw IoError("read error on " + path.string());
    return r;
}

ProportionMatrix aggregate(const std::vector<ReturnsRow>& rows, const PartyMapping& mapping) {
    std::map<int, std::array<std::int64_t, 3>> votes;
    for (const auto& r : rows) {
        const int cycle = r.year % 2 == 0 ? r.year : r.year + 1;
        auto& v = votes[cycle];
        v[static_cast<std::size_t>(mapping.map(r.party))] += r.candidate_votes;
    }
    ProportionMatrix m;
    m.shares.resize(static_cast<Eigen::Index>(votes.size()), 3);
    Eigen::Index i = 0;
    for (const auto& [year, v] : votes) {
        const std::int64_t total = v[0] + v[1] + v[2];
        if (total <= 0) throw AggregationError("cycle " + std::to_string(year) + " has zero total votes");
        m.years.push_back(year);
        bool floored = false;
        for (int j = 0; j < 3; ++j) {
            double share = static_cast<double>(v[j]) / static_cast<double>(total);
            if (share == 0.0) {
                share = kShareFloor;
                floored = true;
            }
            m.shares(i, j) = share;
        }
        if (floored) {
            m.shares.row(i) /= m.shares.row(i).sum();
            m.warnings.push_back("cycle " + std::to_string(year) + ": zero share floored at 1e-9");
        }
        ++i;
    }
    return m;
}

std::string to_csv(const ProportionMatrix& m) {
    std::string out = "year,dem,rep,other\n";
    for (Eigen::Index i = 0; i < m.shares.rows(); ++i) {
        out += std::to_string(m.years[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < 3; ++j) out += ',' + fmt12(m.shares(i, j));
        out += '\n';
    }
    return out;
}

ProportionMatrix parse_proportions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty proportion file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != "year,dem,rep,other") throw SchemaError("proportion header must be year,dem,rep,other");
    ProportionMatrix m;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_delimited(trim(line), ',');
        if (f.size() != 4) throw SchemaError("proportion row needs 4 fields: " + line);
        m.years.push_back(static_cast<int>(parse_double(f[0])));
        rows.push_back({parse_double(f[1]), parse_double(f[2]), parse_double(f[3])});
    }
    m.shares.resize(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 3; ++j) m.shares(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
    return m;
}

WeightedDataset to_weighted_dataset(const ProportionMatrix& m) {
    if (m.shares.rows() == 0) throw DomainError("proportion matrix is empty");
    return WeightedDataset::unweighted(m.shares);
}

}  // namespace mwmean
