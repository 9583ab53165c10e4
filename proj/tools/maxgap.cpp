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

// maxgap: record gaps between primes in residue classes.
//
//   maxgap scan --q 1000 --r 1 --limit 1e9 --format csv --out results
//   maxgap simulate --q 10007 --all-r --limit 1e9 --seed 7 --threads 8
//   maxgap fit --q 313 --limit 1e8 --bins 0.25
//   maxgap sun-check --q 486 --r 127 --n-max 3e5

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxgap/maxgap.hpp"

int main(int argc, char** argv) {
    using namespace maxgap;

    CLI::App app{"Record gaps between primes in residue classes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "File of 'key = value' lines; command-line flags take precedence");

    std::string q, r, limit = "0", seed = "0", n_max = "0", terms = "1e7", stop_after;
    std::string min_end, max_end, format = "compat", variable = "w";
    std::optional<double> c0;
    std::optional<int> k_min, k_max;
    bool all_r = false;
    RunConfig cfg;
    std::string out_dir = ".", checkpoint;
    std::vector<std::string> inputs;

    app.add_option("--q", q, "Modulus q");
    auto* r_opt = app.add_option("--r", r, "Residue r, coprime to q");
    app.add_flag("--all-r", all_r, "Every admissible residue r")->excludes(r_opt);
    app.add_option("--limit", limit, "Upper bound on primes; accepts 1e12");
    app.add_option("--b0", cfg.trend.b0, "Correction term b0")->capture_default_str();
    app.add_option("--b1", cfg.trend.b1, "Correction term b1")->capture_default_str();
    app.add_option("--d", cfg.trend.d, "Correction exponent d")->capture_default_str();
    app.add_option("--seed", seed, "Master seed (simulate, fit --simulated)");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"compat", "csv", "jsonl"}))
        ->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->envname("MAXGAP_OUT")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
    app.add_option("--checkpoint", checkpoint, "Checkpoint directory; reruns resume from it");
    app.add_option("--c0", c0, "Trend offset c0 (report); default: median fit");
    app.add_option("--c1", cfg.c1, "Trend coefficient c1 (report, series)")->capture_default_str();
    app.add_option("--bins", cfg.bin_width, "Histogram bin width (fit)")->capture_default_str();
    app.add_option("--variable", variable, "Rescaled variable to fit")
        ->check(CLI::IsMember({"w", "u", "h"}))
        ->capture_default_str();
    app.add_flag("--simulated", cfg.simulated, "Fit the random control model instead (h only)");
    app.add_option("--min-end", min_end, "Fit only records with end >= this");
    app.add_option("--max-end", max_end, "Fit only records with end <= this");
    app.add_option("--input", inputs, "Fit records read from files instead of scanning");
    app.add_option("--k-min", k_min, "First interval [e^k, e^(k+1)) (counts)");
    app.add_option("--k-max", k_max, "Last interval (counts); default: the one holding limit");
    app.add_option("--n-max", n_max, "Number of class primes to examine (sun-check)");
    app.add_option("--lambda", cfg.lambda, "Log power lambda (series)")->capture_default_str();
    app.add_option("--terms", terms, "Number of terms K (series)")->capture_default_str();
    app.add_option("--stop-after", stop_after, "Interrupt a scan after this many new records");

    struct Sub {
        const char* name;
        Command cmd;
        const char* help;
    };
    const Sub subs[] = {
        {"scan", Command::scan, "Scan record gaps and their rescaled values"},
        {"simulate", Command::simulate, "Record gaps of the random control model"},
        {"fit", Command::fit, "Gumbel fit and histogram data for rescaled records"},
        {"counts", Command::counts, "Record counts per interval and the hyperbola fit"},
        {"exceptional", Command::exceptional, "Records exceeding phi(q) log^2 p"},
        {"sun-check", Command::sun_check, "Violations of p_n^(1/n) decreasing in a class"},
        {"series", Command::series, "Partial sums of sum log^lambda k / k^(1+c1)"},
        {"report", Command::report, "Per-class conjecture evidence table"},
    };
    for (const auto& s : subs) {
        app.add_subcommand(s.name, s.help)->fallthrough()->callback([&cfg, cmd = s.cmd] {
            cfg.command = cmd;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        cfg.format = parse_format(format);
        cfg.variable = variable == "w" ? RescaleMode::W : (variable == "u" ? RescaleMode::U : RescaleMode::H);
        cfg.out_dir = out_dir;
        if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
        cfg.c0 = c0;
        cfg.k_min = k_min;
        cfg.k_max = k_max;
        for (const auto& in : inputs) cfg.inputs.emplace_back(in);
        if (!q.empty()) cfg.q = parse_count(q);
        if (!r.empty()) cfg.r = parse_count(r);
        const bool needs_class = cfg.command != Command::series &&
                                 !(cfg.command == Command::fit && !cfg.inputs.empty());
        if (needs_class && q.empty()) throw usage_error("--q is required");
        if (needs_class && r.empty() && !all_r) throw usage_error("give --r or --all-r");
        cfg.limit = parse_count(limit);
        cfg.seed = parse_count(seed);
        cfg.n_max = parse_count(n_max);
        cfg.terms = parse_count(terms);
        if (!min_end.empty()) cfg.min_end = parse_count(min_end);
        if (!max_end.empty()) cfg.max_end = parse_count(max_end);
        if (!stop_after.empty()) cfg.stop_after = parse_count(stop_after);
    } catch (const std::invalid_argument& e) {
        std::cerr << "maxgap: usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    return run(cfg, std::cout, std::cerr);
}
