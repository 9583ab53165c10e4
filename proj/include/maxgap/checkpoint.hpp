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

// Per-class scan checkpoints. A checkpoint is a small text file of key=value
// lines closed by an FNV-1a checksum, replaced atomically after every record.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "maxgap/gapscan.hpp"
#include "maxgap/io.hpp"

namespace maxgap {

class checkpoint_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Checkpoint {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    ResidueClass cls;
    u64 limit = 0;
    u64 current_prime = 0;
    u64 current_record = 0;
    u64 records_emitted = 0;
    u64 output_bytes = 0;  // length of the class output file covered by this checkpoint
    bool done = false;
    Format format = Format::compat;
    TrendParams trend;

    GapScanner::State scanner_state() const {
        return {current_prime, current_record, records_emitted, false};
    }
};

inline u64 fnv1a64(std::string_view s) {
    u64 h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {

inline std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& c) {
    std::ostringstream os;
    os << "maxgap-checkpoint\n"
       << "format_version=" << c.format_version << '\n'
       << "q=" << c.cls.q << '\n'
       << "r=" << c.cls.r << '\n'
       << "limit=" << c.limit << '\n'
       << "current_prime=" << c.current_prime << '\n'
       << "current_record=" << c.current_record << '\n'
       << "records_emitted=" << c.records_emitted << '\n'
       << "output_bytes=" << c.output_bytes << '\n'
       << "done=" << (c.done ? 1 : 0) << '\n'
       << "output_format=" << extension(c.format) << '\n'
       << "b0=" << detail::hex_double(c.trend.b0) << '\n'
       << "b1=" << detail::hex_double(c.trend.b1) << '\n'
       << "d=" << detail::hex_double(c.trend.d) << '\n';
    std::string body = os.str();
    char sum[32];
    std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    return body + "checksum=" + sum + '\n';
}

inline Checkpoint parse_checkpoint(std::string_view text) {
    const auto pos = text.rfind("checksum=");
    if (text.substr(0, 18) != "maxgap-checkpoint\n" || pos == std::string_view::npos) {
        throw checkpoint_error("checkpoint is not a maxgap checkpoint");
    }
    const std::string_view body = text.substr(0, pos);
    std::string_view stored = text.substr(pos + 9);
    while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.remove_suffix(1);
    char expect[32];
    std::snprintf(expect, sizeof expect, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    if (stored != expect) throw checkpoint_error("checkpoint checksum mismatch");

    std::map<std::string, std::string, std::less<>> kv;
    for (auto line : detail::split(body.substr(18), '\n', true)) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw checkpoint_error("malformed checkpoint line");
        kv.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    auto get = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw checkpoint_error(std::string("checkpoint lacks '") + key + "'");
        return it->second;
    };
    try {
        Checkpoint c;
        c.format_version = static_cast<int>(detail::parse_u64(get("format_version")));
        if (c.format_version != Checkpoint::kFormatVersion) {
            throw checkpoint_error("unsupported checkpoint version " + get("format_version"));
        }
        c.cls = ResidueClass(detail::parse_u64(get("q")), detail::parse_u64(get("r")));
        c.limit = detail::parse_u64(get("limit"));
        c.current_prime = detail::parse_u64(get("current_prime"));
        c.current_record = detail::parse_u64(get("current_record"));
        c.records_emitted = detail::parse_u64(get("records_emitted"));
        c.output_bytes = detail::parse_u64(get("output_bytes"));
        c.done = detail::parse_u64(get("done")) != 0;
        const std::string& fmt = get("output_format");
        c.format = fmt == "txt" ? Format::compat : parse_format(fmt);
        c.trend = {std::strtod(get("b0").c_str(), nullptr), std::strtod(get("b1").c_str(), nullptr),
                   std::strtod(get("d").c_str(), nullptr)};
        return c;
    } catch (const checkpoint_error&) {
        throw;
    } catch (const std::exception& e) {
        throw checkpoint_error(std::string("corrupt checkpoint: ") + e.what());
    }
}

/// Writes to a sibling temporary file, then renames it over the target.
inline void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << serialize_checkpoint(c);
        os.flush();
        if (!os) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// nullopt when no checkpoint exists; checkpoint_error when one exists but is unusable.
inline std::optional<Checkpoint> load_checkpoint(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw checkpoint_error("cannot read checkpoint " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_checkpoint(ss.str());
}

}  // namespace maxgap
