// Copyright 2026 The maxgap Authors
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

#pragma once

// Record serialization: the space-delimited legacy layout, CSV and JSON lines.

#include <charconv>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maxgap/gapscan.hpp"
#include "maxgap/randctl.hpp"

namespace maxgap {

enum class Format { compat, csv, jsonl };

inline std::string_view extension(Format f) {
    switch (f) {
        case Format::compat: return "txt";
        case Format::csv: return "csv";
        case Format::jsonl: return "jsonl";
    }
    return "txt";
}

inline Format parse_format(std::string_view s) {
    if (s == "compat") return Format::compat;
    if (s == "csv") return Format::csv;
    if (s == "jsonl") return Format::jsonl;
    throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

/// 11 significant digits; exponents are written as "E-5" with no space or padding.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11g", v);
    std::string s(buf);
    const auto e = s.find('e');
    if (e == std::string::npos) return s;
    std::string mant = s.substr(0, e);
    std::string exp = s.substr(e + 1);
    std::string sign;
    if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) {
        if (exp[0] == '-') sign = "-";
        exp.erase(0, 1);
    }
    const auto nz = exp.find_first_not_of('0');
    exp = nz == std::string::npos ? "0" : exp.substr(nz);
    return mant + "E" + sign + exp;
}

inline std::string compat_line(const RescaledGap& g) {
    const auto& r = g.record;
    std::string s = format_real(g.w) + ' ' + format_real(g.u) + ' ' + format_real(g.h) + ' ' +
                    std::to_string(r.gap) + ' ' + std::to_string(r.start) + ' ' +
                    std::to_string(r.end) + " q=" + std::to_string(r.cls.q) +
                    " r=" + std::to_string(r.cls.r) + '\n';
    if (is_exceptional(r)) s += "extra large\n";
    return s;
}

inline std::string compat_line(const SimRecord& s) {
    return format_real(s.h) + "  " + std::to_string(s.gap) + ' ' + std::to_string(s.start) + ' ' +
           std::to_string(s.end) + " q=" + std::to_string(s.cls.q) + " r=" +
           std::to_string(s.cls.r) + '\n';
}

inline constexpr std::string_view kScanCsvHeader = "q,r,gap,start,end,w,u,h,exceptional\n";
inline constexpr std::string_view kSimCsvHeader = "q,r,gap,start,end,h\n";

inline std::string csv_line(const RescaledGap& g) {
    const auto& r = g.record;
    return std::to_string(r.cls.q) + ',' + std::to_string(r.cls.r) + ',' + std::to_string(r.gap) +
           ',' + std::to_string(r.start) + ',' + std::to_string(r.end) + ',' + format_real(g.w) +
           ',' + format_real(g.u) + ',' + format_real(g.h) + ',' +
           (is_exceptional(r) ? "1" : "0") + '\n';
}

inline std::string csv_line(const SimRecord& s) {
    return std::to_string(s.cls.q) + ',' + std::to_string(s.cls.r) + ',' + std::to_string(s.gap) +
           ',' + std::to_string(s.start) + ',' + std::to_string(s.end) + ',' + format_real(s.h) +
           '\n';
}

inline std::string jsonl_line(const RescaledGap& g) {
    const auto& r = g.record;
    nlohmann::ordered_json j;
    j["q"] = r.cls.q;
    j["r"] = r.cls.r;
    j["gap"] = r.gap;
    j["start"] = r.start;
    j["end"] = r.end;
    j["w"] = g.w;
    j["u"] = g.u;
    j["h"] = g.h;
    j["exceptional"] = is_exceptional(r);
    return j.dump() + '\n';
}

inline std::string jsonl_line(const SimRecord& s) {
    nlohmann::ordered_json j;
    j["q"] = s.cls.q;
    j["r"] = s.cls.r;
    j["gap"] = s.gap;
    j["start"] = s.start;
    j["end"] = s.end;
    j["h"] = s.h;
    return j.dump() + '\n';
}

template <typename Rec>
std::string format_record(const Rec& rec, Format f) {
    switch (f) {
        case Format::compat: return compat_line(rec);
        case Format::csv: return csv_line(rec);
        case Format::jsonl: return jsonl_line(rec);
    }
    return {};
}

/// File preamble for a format (the CSV header, empty otherwise).
inline std::string_view format_header(Format f, bool simulated) {
    if (f != Format::csv) return {};
    return simulated ? kSimCsvHeader : kScanCsvHeader;
}

/// One record read back from any of the formats. Missing reals stay unset.
struct ParsedRecord {
    u64 q = 0, r = 0, gap = 0, start = 0, end = 0;
    std::optional<double> w, u, h;
};

namespace detail {

inline u64 parse_u64(std::string_view s) {
    u64 v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
}

inline double parse_double(std::string_view s) {
    std::string t(s);
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("not a real number: '" + t + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep, bool skip_empty) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto next = s.find(sep, pos);
        const auto piece = s.substr(pos, next == std::string_view::npos ? s.npos : next - pos);
        if (!(skip_empty && piece.empty())) out.push_back(piece);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

inline u64 parse_tagged(std::string_view field, std::string_view tag) {
    if (field.substr(0, tag.size()) != tag) {
        throw std::invalid_argument("expected '" + std::string(tag) + "' field");
    }
    return parse_u64(field.substr(tag.size()));
}

}  // namespace detail

/// Parses a data line; returns nullopt for headers, blank lines and "extra large" markers.
inline std::optional<ParsedRecord> parse_record_line(std::string_view line, Format f) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    if (line.empty() || line == "extra large" || line.front() == '#') return std::nullopt;
    ParsedRecord rec;
    switch (f) {
        case Format::compat: {
            const auto t = detail::split(line, ' ', true);
            if (t.size() == 8) {
                rec.w = detail::parse_double(t[0]);
                rec.u = detail::parse_double(t[1]);
                rec.h = detail::parse_double(t[2]);
            } else if (t.size() == 6) {
                rec.h = detail::parse_double(t[0]);
            } else {
                throw std::invalid_argument("malformed compat line: " + std::string(line));
            }
            const std::size_t o = t.size() - 5;
            rec.gap = detail::parse_u64(t[o]);
            rec.start = detail::parse_u64(t[o + 1]);
            rec.end = detail::parse_u64(t[o + 2]);
            rec.q = detail::parse_tagged(t[o + 3], "q=");
            rec.r = detail::parse_tagged(t[o + 4], "r=");
            return rec;
        }
        case Format::csv: {
            if (line.substr(0, 2) == "q,") return std::nullopt;
            const auto t = detail::split(line, ',', false);
            if (t.size() != 9 && t.size() != 6) {
                throw std::invalid_argument("malformed csv line: " + std::string(line));
            }
            rec.q = detail::parse_u64(t[0]);
            rec.r = detail::parse_u64(t[1]);
            rec.gap = detail::parse_u64(t[2]);
            rec.start = detail::parse_u64(t[3]);
            rec.end = detail::parse_u64(t[4]);
            if (t.size() == 9) {
                rec.w = detail::parse_double(t[5]);
                rec.u = detail::parse_double(t[6]);
                rec.h = detail::parse_double(t[7]);
            } else {
                rec.h = detail::parse_double(t[5]);
            }
            return rec;
        }
        case Format::jsonl: {
            const auto j = nlohmann::json::parse(line);
            rec.q = j.at("q").get<u64>();
            rec.r = j.at("r").get<u64>();
            rec.gap = j.at("gap").get<u64>();
            rec.start = j.at("start").get<u64>();
            rec.end = j.at("end").get<u64>();
            if (j.contains("w")) rec.w = j["w"].get<double>();
            if (j.contains("u")) rec.u = j["u"].get<double>();
            if (j.contains("h")) rec.h = j["h"].get<double>();
            return rec;
        }
    }
    return std::nullopt;
}

inline std::vector<ParsedRecord> parse_records(std::string_view text, Format f) {
    std::vector<ParsedRecord> out;
    for (auto line : detail::split(text, '\n', true)) {
        if (auto rec = parse_record_line(line, f)) out.push_back(*rec);
    }
    return out;
}

}  // namespace maxgap
