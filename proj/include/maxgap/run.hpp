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

// Command orchestration behind the maxgap tool. Every command fans out over
// residue classes on a worker pool, and every output is assembled in r order,
// so results do not depend on the thread count.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxgap/checkpoint.hpp"
#include "maxgap/conjectures.hpp"
#include "maxgap/evstats.hpp"
#include "maxgap/gapscan.hpp"
#include "maxgap/io.hpp"
#include "maxgap/parallel.hpp"
#include "maxgap/randctl.hpp"
#include "maxgap/records.hpp"

namespace maxgap {

enum class Command { scan, simulate, fit, counts, exceptional, sun_check, series, report };

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitInterrupted = 3 };

struct RunConfig {
    Command command = Command::scan;
    u64 q = 0;
    std::optional<u64> r;  // unset: every admissible residue
    u64 limit = 0;
    TrendParams trend;
    u64 seed = 0;
    Format format = Format::compat;
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    std::optional<std::filesystem::path> checkpoint;  // directory of per-class checkpoints

    // report
    std::optional<double> c0;
    double c1 = 1.0;
    // fit
    double bin_width = 0.25;
    RescaleMode variable = RescaleMode::W;
    bool simulated = false;
    std::optional<u64> min_end;
    std::optional<u64> max_end;
    std::vector<std::filesystem::path> inputs;
    // counts
    std::optional<int> k_min;
    std::optional<int> k_max;
    // sun-check
    u64 n_max = 0;
    // series
    double lambda = 1.0;
    u64 terms = 10'000'000;

    /// Stop a scan after this many records in total, leaving checkpoints in place.
    std::optional<u64> stop_after;
};

class usage_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Accepts plain integers and scientific notation such as "1e12" or "2.5e9".
inline u64 parse_count(std::string_view text) {
    const std::string s(text);
    if (s.empty()) throw usage_error("empty number");
    if (s.find_first_not_of("0123456789") == std::string::npos) {
        try {
            return detail::parse_u64(s);
        } catch (const std::exception&) {
            throw usage_error("number out of range: " + s);
        }
    }
    std::size_t used = 0;
    long double v = 0;
    try {
        v = std::stold(s, &used);
    } catch (const std::exception&) {
        throw usage_error("not a number: " + s);
    }
    if (used != s.size() || !(v >= 0) || v != std::floor(v) || v >= 18446744073709551616.0L) {
        throw usage_error("not a nonnegative integer: " + s);
    }
    return static_cast<u64>(v);
}

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::scan: return "scan";
        case Command::simulate: return "simulate";
        case Command::fit: return "fit";
        case Command::counts: return "counts";
        case Command::exceptional: return "exceptional";
        case Command::sun_check: return "sun-check";
        case Command::series: return "series";
        case Command::report: return "report";
    }
    return "?";
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline void validate(const RunConfig& c) {
    if (c.threads < 1) throw usage_error("--threads must be >= 1");
    if (c.command == Command::series) {
        if (c.terms < 1) throw usage_error("--terms must be >= 1");
        if (!(c.lambda >= 0)) throw usage_error("--lambda must be >= 0");
        return;
    }
    if (c.command == Command::fit && !c.inputs.empty()) {
        if (!(c.bin_width > 0)) throw usage_error("--bins must be positive");
        return;
    }
    if (c.q < 2) throw usage_error("--q must be >= 2");
    if (c.r) {
        try {
            ResidueClass(c.q, *c.r);
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
    }
    if (c.command == Command::sun_check) {
        if (c.n_max < 2) throw usage_error("--n-max must be >= 2");
        return;
    }
    if (c.limit < 2) throw usage_error("--limit must be >= 2");
    try {
        c.trend.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    if (c.command == Command::fit && !(c.bin_width > 0)) throw usage_error("--bins must be positive");
    if (c.command == Command::counts && c.k_min && c.k_max && *c.k_min > *c.k_max) {
        throw usage_error("--k-min must not exceed --k-max");
    }
}

inline std::vector<ResidueClass> selected_classes(const RunConfig& c) {
    if (c.r) return {ResidueClass(c.q, *c.r)};
    return admissible_classes(c.q);
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
    const auto probe = dir / ".maxgap-write-probe";
    {
        std::ofstream os(probe);
        if (!os) throw std::runtime_error("output directory is not writable: " + dir.string());
    }
    std::filesystem::remove(probe, ec);
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << text;
    os.flush();
    if (!os) throw std::runtime_error("cannot write " + p.string());
}

inline std::filesystem::path class_file(const RunConfig& c, const ResidueClass& cls) {
    return c.out_dir / (std::to_string(cls.q) + "_" + std::to_string(cls.r) + "." +
                        std::string(extension(c.format)));
}

/// Concatenates the per-class files in r order, keeping a single CSV header.
inline void write_merged(const RunConfig& c, const std::vector<ResidueClass>& classes,
                         bool simulated) {
    std::string merged(format_header(c.format, simulated));
    const auto header_len = merged.size();
    for (const auto& cls : classes) {
        const std::string body = read_file(class_file(c, cls));
        merged.append(body, std::min(header_len, body.size()), std::string::npos);
    }
    write_file(c.out_dir / (std::to_string(c.q) + "_all." + std::string(extension(c.format))),
               merged);
}

struct ScanOutcome {
    u64 records = 0;
    u64 exceptional = 0;
    bool complete = false;
};

// Scans one class into its output file, checkpointing after every record when enabled.
inline ScanOutcome scan_class_to_file(const RunConfig& c, const ResidueClass& cls,
                                      std::atomic<u64>& emitted_total, std::atomic<bool>& stop) {
    const auto path = class_file(c, cls);
    std::optional<std::filesystem::path> ckpt_path;
    std::optional<Checkpoint> ckpt;
    if (c.checkpoint) {
        ckpt_path = *c.checkpoint / (std::to_string(cls.q) + "_" + std::to_string(cls.r) + ".ckpt");
        ckpt = load_checkpoint(*ckpt_path);
    }

    ScanOutcome outcome;
    std::optional<GapScanner> scanner;
    std::ofstream os;
    if (ckpt) {
        if (ckpt->cls != cls || ckpt->format != c.format || ckpt->trend.b0 != c.trend.b0 ||
            ckpt->trend.b1 != c.trend.b1 || ckpt->trend.d != c.trend.d) {
            throw checkpoint_error("checkpoint " + ckpt_path->string() +
                                   " was written with a different configuration");
        }
        if (c.limit < ckpt->limit) {
            throw checkpoint_error("checkpoint " + ckpt_path->string() +
                                   " was written for a larger limit");
        }
        std::error_code ec;
        const auto size = std::filesystem::file_size(path, ec);
        if (ec || size < ckpt->output_bytes) {
            throw checkpoint_error("output file " + path.string() +
                                   " is shorter than its checkpoint records");
        }
        std::filesystem::resize_file(path, ckpt->output_bytes);
        for (const auto& rec : parse_records(read_file(path), c.format)) {
            if (is_exceptional(GapRecord{rec.start, rec.end, rec.gap, cls})) ++outcome.exceptional;
        }
        outcome.records = ckpt->records_emitted;
        if (ckpt->done && ckpt->limit == c.limit) {
            outcome.complete = true;
            return outcome;
        }
        scanner.emplace(cls, c.limit, c.trend, ckpt->scanner_state());
        os.open(path, std::ios::binary | std::ios::app);
    } else {
        scanner.emplace(cls, c.limit, c.trend);
        os.open(path, std::ios::binary | std::ios::trunc);
        os << format_header(c.format, false);
    }
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os.flush();

    Checkpoint cp;
    cp.cls = cls;
    cp.limit = c.limit;
    cp.format = c.format;
    cp.trend = c.trend;
    auto save = [&](bool done) {
        if (!ckpt_path) return;
        const auto& st = scanner->state();
        cp.current_prime = st.prime;
        cp.current_record = st.record;
        cp.records_emitted = st.emitted;
        cp.output_bytes = static_cast<u64>(os.tellp());
        cp.done = done;
        write_checkpoint(*ckpt_path, cp);
    };
    save(false);

    for (;;) {
        if (stop.load()) return outcome;
        const auto rec = scanner->next();
        if (!rec) break;
        os << format_record(*rec, c.format);
        os.flush();
        if (!os) throw std::runtime_error("write failed on " + path.string());
        ++outcome.records;
        if (is_exceptional(rec->record)) ++outcome.exceptional;
        save(false);
        const u64 total = ++emitted_total;
        if (c.stop_after && total >= *c.stop_after) stop = true;
    }
    save(true);
    outcome.complete = true;
    return outcome;
}

inline int run_scan(const RunConfig& c, std::ostream& out) {
    const auto classes = selected_classes(c);
    ensure_dir(c.out_dir);
    if (c.checkpoint) ensure_dir(*c.checkpoint);
    std::atomic<u64> emitted{0};
    std::atomic<bool> stop{false};
    const auto outcomes = parallel_map(classes.size(), c.threads, [&](std::size_t i) {
        return scan_class_to_file(c, classes[i], emitted, stop);
    });
    u64 records = 0, exceptional = 0;
    bool complete = true;
    for (const auto& o : outcomes) {
        records += o.records;
        exceptional += o.exceptional;
        complete = complete && o.complete;
    }
    if (!complete) {
        out << "interrupted after " << emitted.load() << " new records; rerun with the same "
            << "--checkpoint to resume\n";
        return kExitInterrupted;
    }
    write_merged(c, classes, false);
    out << "scan q=" << c.q << " classes=" << classes.size() << " limit=" << c.limit
        << " records=" << records << " exceptional=" << exceptional << '\n';
    return kExitOk;
}

inline int run_simulate(const RunConfig& c, std::ostream& out) {
    const auto classes = selected_classes(c);
    ensure_dir(c.out_dir);
    const auto counts = parallel_map(classes.size(), c.threads, [&](std::size_t i) {
        const auto recs = simulate({classes[i], c.limit, c.seed});
        std::string text(format_header(c.format, true));
        for (const auto& rec : recs) text += format_record(rec, c.format);
        write_file(class_file(c, classes[i]), text);
        return recs.size();
    });
    write_merged(c, classes, true);
    std::size_t total = 0;
    for (auto n : counts) total += n;
    out << "simulate q=" << c.q << " classes=" << classes.size() << " limit=" << c.limit
        << " seed=" << c.seed << " records=" << total << '\n';
    return kExitOk;
}

inline bool in_window(const RunConfig& c, u64 end) {
    return (!c.min_end || end >= *c.min_end) && (!c.max_end || end <= *c.max_end);
}

inline std::vector<double> collect_fit_samples(const RunConfig& c) {
    std::vector<double> samples;
    auto pick = [&](const ParsedRecord& p) {
        const auto& v = c.variable == RescaleMode::W ? p.w : (c.variable == RescaleMode::U ? p.u : p.h);
        if (!v) throw std::runtime_error("input lacks the requested rescaled variable");
        return *v;
    };
    if (!c.inputs.empty()) {
        for (const auto& in : c.inputs) {
            const auto ext = in.extension().string();
            const Format f = ext == ".csv" ? Format::csv : (ext == ".jsonl" ? Format::jsonl : Format::compat);
            for (const auto& p : parse_records(read_file(in), f)) {
                if (in_window(c, p.end)) samples.push_back(pick(p));
            }
        }
        return samples;
    }
    const auto classes = selected_classes(c);
    const auto per_class = parallel_map(classes.size(), c.threads, [&](std::size_t i) {
        std::vector<double> v;
        if (c.simulated) {
            for (const auto& s : simulate({classes[i], c.limit, c.seed})) {
                if (in_window(c, s.end)) v.push_back(s.h);
            }
        } else {
            for (const auto& g : scan_records(classes[i], c.limit, c.trend)) {
                if (!in_window(c, g.record.end)) continue;
                v.push_back(c.variable == RescaleMode::W ? g.w : (c.variable == RescaleMode::U ? g.u : g.h));
            }
        }
        return v;
    });
    for (const auto& v : per_class) samples.insert(samples.end(), v.begin(), v.end());
    return samples;
}

inline int run_fit(const RunConfig& c, std::ostream& out) {
    if (c.simulated && c.variable != RescaleMode::H) {
        throw usage_error("simulated records carry only the h rescaling");
    }
    ensure_dir(c.out_dir);
    const auto samples = collect_fit_samples(c);
    const GumbelFit fit = fit_gumbel(samples);
    const Histogram hist = make_histogram(samples, c.bin_width, 0.0);

    std::string text = "bin_start,bin_width,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        text += format_real(hist.bin_start + static_cast<double>(i) * hist.bin_width) + ',' +
                format_real(hist.bin_width) + ',' + std::to_string(hist.counts[i]) + '\n';
    }
    text += "# gumbel alpha=" + format_real(fit.params.alpha) + " mu=" + format_real(fit.params.mu) +
            " n=" + std::to_string(fit.n) + " ks=" + format_real(fit.ks) +
            " loglik=" + format_real(fit.loglik) + '\n';
    const std::string stem = c.inputs.empty() ? std::to_string(c.q) : std::string("input");
    write_file(c.out_dir / (stem + "_fit.csv"), text);
    out << "fit n=" << fit.n << " alpha=" << format_real(fit.params.alpha)
        << " mu=" << format_real(fit.params.mu) << " ks=" << format_real(fit.ks)
        << " loglik=" << format_real(fit.loglik) << '\n';
    return kExitOk;
}

inline int run_counts(const RunConfig& c, std::ostream& out) {
    ensure_dir(c.out_dir);
    const int k_lo = c.k_min.value_or(0);
    const int k_hi = c.k_max.value_or(log_bin(c.limit));
    const double guess = guesstimate_N(c.q, static_cast<double>(c.limit));
    std::string text;
    if (c.r) {
        const auto recs = records_of(scan_records(ResidueClass(c.q, *c.r), c.limit, c.trend));
        const auto counts = interval_counts(recs, k_lo, k_hi);
        text = "k,count\n";
        for (int k = k_lo; k <= k_hi; ++k) {
            text += std::to_string(k) + ',' + std::to_string(counts[static_cast<std::size_t>(k - k_lo)]) + '\n';
        }
        out << "counts q=" << c.q << " r=" << *c.r << " N(" << c.limit
            << ")=" << count_records(recs, c.limit) << " guesstimate=" << format_real(guess) << '\n';
        write_file(c.out_dir / (std::to_string(c.q) + "_" + std::to_string(*c.r) + "_counts.csv"), text);
        return kExitOk;
    }
    if (c.q < 3) throw usage_error("class averages need q >= 3");
    const auto means = mean_over_classes(c.q, c.limit, k_lo, k_hi, c.trend, c.threads);
    text = "k,mean,coverage\n";
    double mean_total = 0;
    for (std::size_t b = 0; b < means.mean_counts.size(); ++b) {
        text += std::to_string(k_lo + static_cast<int>(b)) + ',' + format_real(means.mean_counts[b]) +
                ',' + std::to_string(means.coverage[b]) + '\n';
        mean_total += means.mean_counts[b];
    }
    out << "counts q=" << c.q << " classes=" << means.per_class_counts.size()
        << " mean N(bins " << k_lo << ".." << k_hi << ")=" << format_real(mean_total)
        << " guesstimate=" << format_real(guess) << '\n';
    try {
        const auto hyp = fit_hyperbola(means);
        text += "# hyperbola kappa=" + format_real(hyp.kappa) + " delta=" + format_real(hyp.delta) +
                " rms=" + format_real(hyp.residual) + " points=" + std::to_string(hyp.points) + '\n';
        out << "hyperbola kappa=" << format_real(hyp.kappa) << " delta=" << format_real(hyp.delta)
            << " rms=" << format_real(hyp.residual) << '\n';
    } catch (const insufficient_data_error&) {
        out << "hyperbola: fewer than 3 fully covered bins\n";
    }
    write_file(c.out_dir / (std::to_string(c.q) + "_counts.csv"), text);
    return kExitOk;
}

inline int run_exceptional(const RunConfig& c, std::ostream& out) {
    const auto classes = selected_classes(c);
    ensure_dir(c.out_dir);
    const auto found = parallel_map(classes.size(), c.threads, [&](std::size_t i) {
        std::vector<RescaledGap> v;
        for (const auto& g : scan_records(classes[i], c.limit, c.trend)) {
            if (is_exceptional(g.record)) v.push_back(g);
        }
        return v;
    });
    std::string text(format_header(c.format, false));
    std::size_t total = 0;
    for (const auto& v : found) {
        for (const auto& g : v) {
            text += format_record(g, c.format);
            out << g.record.gap << ' ' << g.record.start << ' ' << g.record.end << " q="
                << g.record.cls.q << " r=" << g.record.cls.r
                << " ratio=" << fmt("%.10f", cramer_ratio(g.record)) << '\n';
            ++total;
        }
    }
    write_file(c.out_dir / (std::to_string(c.q) + "_exceptional." + std::string(extension(c.format))), text);
    out << "exceptional q=" << c.q << " classes=" << classes.size() << " limit=" << c.limit
        << " found=" << total << '\n';
    return kExitOk;
}

inline int run_sun_check(const RunConfig& c, std::ostream& out) {
    const auto classes = selected_classes(c);
    ensure_dir(c.out_dir);
    const auto found = parallel_map(classes.size(), c.threads, [&](std::size_t i) {
        return sun_firoozbakht_scan(classes[i], c.n_max);
    });
    std::string text = "q,r,n,p_n,p_next,margin\n";
    std::size_t total = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (const auto& v : found[i]) {
            const std::string margin = fmt("%.6f", static_cast<double>(v.margin));
            text += std::to_string(classes[i].q) + ',' + std::to_string(classes[i].r) + ',' +
                    std::to_string(v.n) + ',' + std::to_string(v.p_n) + ',' +
                    std::to_string(v.p_next) + ',' + margin + '\n';
            out << "violation q=" << classes[i].q << " r=" << classes[i].r << " n=" << v.n
                << " p_n=" << v.p_n << " p_n+1=" << v.p_next << " margin=" << margin << '\n';
            ++total;
        }
    }
    write_file(c.out_dir / (std::to_string(c.q) + "_sun.csv"), text);
    out << "sun-check q=" << c.q << " classes=" << classes.size() << " n_max=" << c.n_max
        << " violations=" << total << '\n';
    return kExitOk;
}

inline int run_series(const RunConfig& c, std::ostream& out) {
    const auto s = series_partial(c.c1, c.lambda, c.terms);
    out << "series c1=" << format_real(c.c1) << " lambda=" << format_real(c.lambda)
        << " K=" << c.terms << " partial_sum=" << fmt("%.12g", s.partial_sum)
        << " tail_bound=" << fmt("%.12g", s.tail_bound) << " estimate=" << fmt("%.12g", s.estimate())
        << " regime=" << to_string(classify_c1(c.c1)) << '\n';
    return kExitOk;
}

inline int run_report(const RunConfig& c, std::ostream& out) {
    const auto classes = selected_classes(c);
    ensure_dir(c.out_dir);
    const TrendConjectureParams params{c.c0, c.c1};
    const auto reports = parallel_map(classes.size(), c.threads, [&](std::size_t i) {
        const auto recs = records_of(scan_records(classes[i], c.limit, c.trend));
        return std::make_pair(recs.size(), cramer_report(classes[i], recs, c.limit, params));
    });
    std::string text =
        "q,r,limit,records,max_ratio,fraction_below_one,exceptional,firoozbakht_violations,"
        "sign_changes,c0\n";
    std::size_t exceptional = 0, records = 0;
    double max_ratio = 0;
    for (const auto& [n, rep] : reports) {
        text += std::to_string(rep.cls.q) + ',' + std::to_string(rep.cls.r) + ',' +
                std::to_string(rep.limit) + ',' + std::to_string(n) + ',' +
                (rep.max_ratio ? format_real(*rep.max_ratio) : std::string("")) + ',' +
                format_real(rep.fraction_below_one) + ',' + std::to_string(rep.exceptional.size()) +
                ',' + std::to_string(rep.firoozbakht_violations.size()) + ',' +
                std::to_string(rep.sign_changes) + ',' + format_real(rep.c0) + '\n';
        exceptional += rep.exceptional.size();
        records += n;
        if (rep.max_ratio) max_ratio = std::max(max_ratio, *rep.max_ratio);
    }
    write_file(c.out_dir / (std::to_string(c.q) + "_report.csv"), text);
    out << "report q=" << c.q << " classes=" << classes.size() << " limit=" << c.limit
        << " records=" << records << " exceptional=" << exceptional
        << " max_ratio=" << format_real(max_ratio) << " c1=" << format_real(c.c1)
        << " regime=" << to_string(classify_c1(c.c1)) << '\n';
    return kExitOk;
}

}  // namespace detail

/// Runs one command. Returns an ExitCode; diagnostics go to err.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        detail::validate(config);
        switch (config.command) {
            case Command::scan: return detail::run_scan(config, out);
            case Command::simulate: return detail::run_simulate(config, out);
            case Command::fit: return detail::run_fit(config, out);
            case Command::counts: return detail::run_counts(config, out);
            case Command::exceptional: return detail::run_exceptional(config, out);
            case Command::sun_check: return detail::run_sun_check(config, out);
            case Command::series: return detail::run_series(config, out);
            case Command::report: return detail::run_report(config, out);
        }
    } catch (const usage_error& e) {
        err << "maxgap " << to_string(config.command) << ": usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const checkpoint_error& e) {
        err << "maxgap " << to_string(config.command) << ": refusing to resume: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "maxgap " << to_string(config.command) << ": error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace maxgap
