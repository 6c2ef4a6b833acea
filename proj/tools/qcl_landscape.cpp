// Copyright 2026 The qcl-landscape Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qcl-landscape: data generation, training sweeps and landscape analysis.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "qcl/connectivity.hpp"
#include "qcl/harness.hpp"
#include "qcl/io.hpp"
#include "qcl/landscape.hpp"

#ifndef QCL_VERSION
#define QCL_VERSION "0.0.0"
#endif

namespace {

namespace fs = std::filesystem;
using qcl::json;
using qcl::param_vector;

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_io = 3;
constexpr int exit_numerical = 4;
constexpr int exit_internal = 1;

fs::path default_out_dir() {
    const char *env = std::getenv("QCL_LANDSCAPE_OUT");
    return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

fs::path resolve_out(const std::string &flag, const std::string &fallback_name) {
    return flag.empty() ? default_out_dir() / fallback_name : fs::path(flag);
}

fs::path sidecar_path(const fs::path &out) {
    fs::path p = out;
    p += ".json";
    return p;
}

std::string fnv1a_hex(const std::string &text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json tool_info() { return {{"name", "qcl-landscape"}, {"version", QCL_VERSION}}; }

// ---------------------------------------------------------------------------
// Shared inputs of the landscape commands

struct circuit_options {
    std::string layout = "cycle";
    std::size_t depth = 1;
    std::size_t n_qubits = 3;
    std::string encoding = "rz_first";

    void add_to(CLI::App *cmd) {
        cmd->add_option("--layout", layout, "Entangler layout: chain or cycle")->capture_default_str();
        cmd->add_option("--depth", depth, "Number of rotation/entangler blocks")->capture_default_str();
        cmd->add_option("--n-qubits", n_qubits, "Qubit count")->capture_default_str();
        cmd->add_option("--encoding", encoding, "Feature encoding order: rz_first or ry_first")
            ->capture_default_str();
    }

    [[nodiscard]] qcl::circuit_spec build() const {
        qcl::ansatz_options opt;
        opt.encoding = qcl::parse_encoding_order(encoding);
        return qcl::build_ansatz(qcl::parse_layout(layout), depth, n_qubits, opt);
    }

    [[nodiscard]] json to_json() const {
        return {{"layout", layout}, {"depth", depth}, {"n_qubits", n_qubits}, {"encoding", encoding}};
    }
};

struct data_options {
    std::string data_csv;
    std::uint64_t data_seed = 0;
    double split_ratio = 0.8;

    void add_to(CLI::App *cmd) {
        cmd->add_option("--data", data_csv, "Dataset CSV written by gen-data (overrides --data-seed)");
        cmd->add_option("--data-seed", data_seed, "Seed of the generated dataset and split")
            ->capture_default_str();
        cmd->add_option("--split-ratio", split_ratio, "Train fraction of the generated dataset")
            ->capture_default_str();
    }

    [[nodiscard]] qcl::data_split load() const {
        if (!data_csv.empty()) {
            return qcl::read_dataset_csv(data_csv).parts;
        }
        return qcl::split(qcl::generate_dataset(data_seed), split_ratio, data_seed);
    }

    [[nodiscard]] json to_json() const {
        if (!data_csv.empty()) {
            return {{"data", data_csv}};
        }
        return {{"data_seed", data_seed}, {"split_ratio", split_ratio}};
    }
};

/// Parameter vectors given inline as JSON arrays, as JSON files, or as AMS members.
struct point_options {
    std::vector<std::string> thetas;
    std::string ams_file;
    std::vector<std::size_t> members;

    void add_to(CLI::App *cmd, std::size_t count) {
        thetas.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::string flag = std::string("--theta-") + static_cast<char>('a' + i);
            cmd->add_option(flag, thetas[i], "Parameter vector: inline JSON array or path to a JSON file");
        }
        cmd->add_option("--ams", ams_file, "AMS file; pick members with --members");
        cmd->add_option("--members", members,
                        std::to_string(count) + " comma-separated AMS member indices (default 0.." +
                            std::to_string(count - 1) + ")")
            ->delimiter(',')
            ->expected(static_cast<int>(count));
    }

    [[nodiscard]] std::vector<param_vector> load(std::size_t count) const {
        std::vector<param_vector> out;
        if (!ams_file.empty()) {
            if (std::any_of(thetas.begin(), thetas.end(), [](const auto &t) { return !t.empty(); })) {
                throw qcl::config_error("--theta-* and --ams are mutually exclusive");
            }
            const auto ams = qcl::ams_from_json(qcl::read_json_file(ams_file), ams_file);
            std::vector<std::size_t> idx = members;
            if (idx.empty()) {
                for (std::size_t i = 0; i < count; ++i) {
                    idx.push_back(i);
                }
            }
            for (const auto i : idx) {
                if (i >= ams.size()) {
                    throw qcl::index_error("--members: index " + std::to_string(i) + " but '" +
                                           ams_file + "' holds " + std::to_string(ams.size()) +
                                           " members");
                }
                out.push_back(ams[i].center);
            }
            return out;
        }
        for (std::size_t i = 0; i < count; ++i) {
            const auto &t = thetas[i];
            const std::string where = std::string("--theta-") + static_cast<char>('a' + i);
            if (t.empty()) {
                throw qcl::config_error(where + " is required unless --ams is given");
            }
            const json j = !t.empty() && t.front() == '[' ? qcl::parse_json_text(t, where)
                                                          : qcl::read_json_file(t);
            out.push_back(qcl::param_vector_from_json(j, where));
        }
        return out;
    }

    [[nodiscard]] json to_json(const std::vector<param_vector> &points) const {
        json j{{"points", json::array()}};
        for (const auto &p : points) {
            j["points"].push_back(qcl::to_json_array(p));
        }
        if (!ams_file.empty()) {
            j["ams"] = ams_file;
            j["members"] = members;
        }
        return j;
    }
};

void check_dimensions(const qcl::circuit_spec &spec, const std::vector<param_vector> &points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<std::size_t>(points[i].size()) != spec.param_count()) {
            throw qcl::shape_error("parameter vector " + std::to_string(i) + " has " +
                                   std::to_string(points[i].size()) + " entries but the circuit has " +
                                   std::to_string(spec.param_count()) +
                                   " parameters (check --layout/--depth)");
        }
    }
}

// ---------------------------------------------------------------------------
// gen-data

struct gen_data_cmd {
    std::uint64_t seed = 0;
    double split_ratio = 0.8;
    std::string out;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("gen-data", "Write the noisy parabola dataset with its split");
        cmd->add_option("--seed", seed, "Dataset and split seed")->capture_default_str();
        cmd->add_option("--split-ratio", split_ratio, "Train fraction")->capture_default_str();
        cmd->add_option("--out", out, "Output CSV (default $QCL_LANDSCAPE_OUT/data_seed<N>.csv)");
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        const auto data = qcl::generate_dataset(seed);
        const auto parts = qcl::split(data, split_ratio, seed);
        const auto path = resolve_out(out, "data_seed" + std::to_string(seed) + ".csv");
        qcl::write_dataset_csv(path, data, parts);
        qcl::write_json_file(sidecar_path(path), {{"seed", seed},
                                                  {"split_ratio", split_ratio},
                                                  {"rows", data.size()},
                                                  {"tool", tool_info()}});
        std::printf("wrote %s (%zu rows: %zu train, %zu test, seed %llu)\n", path.string().c_str(),
                    data.size(), parts.train.size(), parts.test.size(),
                    static_cast<unsigned long long>(seed));
        return exit_ok;
    }
};

// ---------------------------------------------------------------------------
// sweep

struct sweep_cmd {
    std::string config;
    std::string out_dir;
    std::size_t jobs = 1;
    bool dry_run = false;
    std::optional<std::uint64_t> seed;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("sweep", "Train every configuration of a grid (resumable)");
        cmd->add_option("--config", config, "Sweep configuration JSON")->required();
        cmd->add_option("--out", out_dir,
                        "Output directory for manifest.json and records.jsonl "
                        "(default $QCL_LANDSCAPE_OUT)");
        cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_flag("--dry-run", dry_run, "Print the run count and write nothing");
        cmd->add_option("--seed", seed, "Dataset seed; overrides data_seed of the config");
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        const json doc = qcl::read_json_file(config);
        auto cfg = qcl::sweep_config_from_json(doc, config);
        if (seed) {
            cfg.grid.base.data_seed = *seed;
        }
        const std::uint64_t data_seed = cfg.grid.base.data_seed;
        const auto runs = qcl::expand(cfg.grid);
        if (dry_run) {
            std::printf("%zu runs (%zu layouts x %zu depths x %zu optimizers x %zu seeds x "
                        "%zu inits x %zu batch sizes); data seed %llu\n",
                        runs.size(), cfg.grid.layouts.size(), cfg.grid.depths.size(),
                        cfg.grid.optimizers.size(), cfg.grid.seeds.size(), cfg.grid.inits.size(),
                        cfg.grid.batch_sizes.size(), static_cast<unsigned long long>(data_seed));
            return exit_ok;
        }

        const fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
        const fs::path manifest_path = dir / "manifest.json";
        const fs::path records_path = dir / "records.jsonl";
        const std::string experiment = fnv1a_hex(doc.dump() + ";data_seed=" + std::to_string(data_seed));
        if (fs::exists(manifest_path)) {
            const json old = qcl::read_json_file(manifest_path);
            const auto old_id = old.value("experiment_id", std::string{});
            if (old_id != experiment) {
                throw qcl::config_error("output directory '" + dir.string() +
                                        "' already holds experiment " + old_id +
                                        "; use a fresh --out for experiment " + experiment);
            }
        } else {
            qcl::write_json_file(manifest_path, {{"experiment_id", experiment},
                                                 {"config", config},
                                                 {"config_document", doc},
                                                 {"output_dir", dir.string()},
                                                 {"seed", data_seed},
                                                 {"runs", runs.size()},
                                                 {"tool", tool_info()}});
        }

        qcl::repair_jsonl_tail(records_path);
        std::unordered_set<std::string> done;
        if (fs::exists(records_path)) {
            const auto previous = qcl::read_records(records_path);
            done = qcl::completed_hashes(previous);
        }

        const auto data = qcl::split(qcl::generate_dataset(data_seed), cfg.split_ratio, data_seed);
        auto sink = qcl::open_for_write(records_path, std::ios::app);
        const bool timing = cfg.record_timing;
        const auto report = qcl::sweep(
            cfg.grid, data, done,
            [&](qcl::train_record rec) {
                if (!timing) {
                    rec.duration_s = 0.0;
                }
                sink << qcl::to_json(rec).dump() << '\n';
                sink.flush();
                if (!sink) {
                    throw qcl::io_error("failed appending to '" + records_path.string() + "'");
                }
            },
            jobs);
        std::printf("%zu completed, %zu skipped (already in %s), %zu failed\n", report.completed,
                    report.skipped, records_path.string().c_str(), report.failures.size());
        for (const auto &f : report.failures) {
            std::fprintf(stderr, "run %s failed: %s\n", qcl::config_hash(f.config).c_str(),
                         f.message.c_str());
        }
        return report.failures.empty() ? exit_ok : exit_numerical;
    }
};

// ---------------------------------------------------------------------------
// report

struct report_cmd {
    std::string records;
    std::string out;
    std::uint64_t seed = 0;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("report", "Per (layout, depth, optimizer) statistics of best test MSE");
        cmd->add_option("--records", records, "JSONL records from sweep")->required();
        cmd->add_option("--out", out, "Summary CSV (default $QCL_LANDSCAPE_OUT/summary.csv)");
        cmd->add_option("--seed", seed, "Recorded in the sidecar; the report is deterministic")
            ->capture_default_str();
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        const auto recs = qcl::read_records(records);
        const qcl::histogram_spec hist;
        const auto groups = qcl::summarize(recs, hist);
        const auto path = resolve_out(out, "summary.csv");
        {
            auto csv = qcl::open_for_write(path);
            csv << "layout,depth,optimizer,n,median_best_test_mse,lowest_bin,lowest_bin_midpoint,"
                   "lowest_bin_occupancy,mean_steps_to_best,below_range,above_range\n";
            for (const auto &g : groups) {
                csv << qcl::to_string(g.key.layout) << ',' << g.key.depth << ','
                    << qcl::to_string(g.key.optimizer) << ',' << g.n << ','
                    << qcl::format_double(g.median_best_test_mse) << ',' << g.lowest_bin << ','
                    << qcl::format_double(g.lowest_bin_midpoint) << ',' << g.lowest_bin_occupancy
                    << ',' << qcl::format_double(g.mean_steps_to_best) << ',' << g.below_range << ','
                    << g.above_range << '\n';
            }
            if (!csv) {
                throw qcl::io_error("failed writing '" + path.string() + "'");
            }
        }
        qcl::write_json_file(sidecar_path(path),
                             {{"records", records},
                              {"n_records", recs.size()},
                              {"histogram", {{"lo", hist.lo}, {"hi", hist.hi}, {"bins", hist.bins}}},
                              {"seed", seed},
                              {"tool", tool_info()}});

        std::printf("%-6s %5s %-5s %4s %12s %10s %9s %10s\n", "layout", "depth", "opt", "n",
                    "median_mse", "low_bin_mid", "occupancy", "steps");
        for (const auto &g : groups) {
            std::printf("%-6s %5zu %-5s %4zu %12.5f %10.5f %9zu %10.1f\n",
                        qcl::to_string(g.key.layout).c_str(), g.key.depth,
                        qcl::to_string(g.key.optimizer).c_str(), g.n, g.median_best_test_mse,
                        g.lowest_bin_midpoint, g.lowest_bin_occupancy, g.mean_steps_to_best);
        }
        std::printf("wrote %s\n", path.string().c_str());
        return exit_ok;
    }
};

// ---------------------------------------------------------------------------
// ams

struct ams_cmd {
    std::string records;
    std::string out;
    std::optional<double> bandwidth;
    double quantile = 0.3;
    bool wrap = false;
    std::string optimizer;
    double split_ratio = 0.8;
    std::uint64_t seed = 0;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("ams", "Aggregate minima set from sweep records");
        cmd->add_option("--records", records, "JSONL records from sweep")->required();
        cmd->add_option("--out", out, "AMS JSON (default $QCL_LANDSCAPE_OUT/ams.json)");
        cmd->add_option("--bandwidth", bandwidth, "Mean-shift bandwidth (default: pairwise-distance quantile)");
        cmd->add_option("--quantile", quantile, "Quantile for the default bandwidth")->capture_default_str();
        cmd->add_flag("--wrap", wrap, "Wrap angles into [0, 2pi) before clustering");
        cmd->add_option("--optimizer", optimizer, "Use only records of this optimizer");
        cmd->add_option("--split-ratio", split_ratio, "Train fraction used by the sweep")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Recorded in the sidecar; clustering is deterministic")
            ->capture_default_str();
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        auto recs = qcl::read_records(records);
        if (!optimizer.empty()) {
            const auto kind = qcl::parse_optimizer(optimizer);
            std::erase_if(recs, [&](const qcl::train_record &r) { return r.config.optimizer.kind != kind; });
        }
        if (recs.empty()) {
            throw qcl::domain_error("no records to aggregate in '" + records + "'");
        }
        const auto &first = recs.front().config;
        for (const auto &r : recs) {
            const auto &c = r.config;
            if (c.layout != first.layout || c.depth != first.depth || c.n_qubits != first.n_qubits ||
                c.encoding != first.encoding || c.data_seed != first.data_seed) {
                throw qcl::config_error("records mix circuits or datasets (record " +
                                        qcl::config_hash(c) + "); filter them first");
            }
        }
        const auto spec = qcl::circuit_for(first);
        const auto data = qcl::split(qcl::generate_dataset(first.data_seed), split_ratio, first.data_seed);
        qcl::ams_options opt;
        opt.bandwidth = bandwidth;
        opt.bandwidth_quantile = quantile;
        opt.wrap = wrap;
        const auto ams = qcl::build_ams(
            recs, [&](const param_vector &t) { return qcl::mse_loss(spec, t, data.test); }, opt);
        const auto path = resolve_out(out, "ams.json");
        qcl::write_json_file(path, qcl::to_json(ams));
        qcl::write_json_file(sidecar_path(path),
                             {{"records", records},
                              {"n_runs", recs.size()},
                              {"n_selected", ams.n_selected},
                              {"n_clusters", ams.n_clusters},
                              {"n_members", ams.members.size()},
                              {"selection_bin", ams.selection_bin ? json(*ams.selection_bin) : json()},
                              {"bandwidth", ams.bandwidth},
                              {"wrap", wrap},
                              {"circuit", qcl::to_json(spec)},
                              {"data_seed", first.data_seed},
                              {"seed", seed},
                              {"tool", tool_info()}});
        std::printf("n_p %zu, n_c %zu, |AMS| %zu (bandwidth %.4g); wrote %s\n", ams.n_selected,
                    ams.n_clusters, ams.members.size(), ams.bandwidth, path.string().c_str());
        return exit_ok;
    }
};

// ---------------------------------------------------------------------------
// neb

struct neb_cmd {
    circuit_options circuit;
    data_options data;
    point_options points;
    std::string profile = "localized";
    std::optional<std::size_t> pivots;
    std::optional<std::size_t> steps;
    std::optional<double> lr;
    std::optional<double> spring;
    std::size_t batch_size = 32;
    double epsilon = 0.02;
    std::uint64_t seed = 0;
    std::string out;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("neb", "Nudged elastic band between two minima");
        circuit.add_to(cmd);
        data.add_to(cmd);
        points.add_to(cmd, 2);
        cmd->add_option("--profile", profile, "localized, long or medium")->capture_default_str();
        cmd->add_option("--pivots", pivots, "Override the profile's pivot count");
        cmd->add_option("--steps", steps, "Override the profile's step count");
        cmd->add_option("--lr", lr, "Override the profile's learning rate");
        cmd->add_option("--spring", spring, "Override the spring constant");
        cmd->add_option("--batch-size", batch_size, "Per-pivot mini-batch size")->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "Connectivity threshold")->capture_default_str();
        cmd->add_option("--seed", seed, "Band RNG seed (combined with the member indices for AMS pairs)")
            ->capture_default_str();
        cmd->add_option("--out", out, "Trace CSV (default $QCL_LANDSCAPE_OUT/neb.csv)");
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        auto prof = qcl::neb_profile::named(profile);
        prof.pivots = pivots.value_or(prof.pivots);
        prof.steps = steps.value_or(prof.steps);
        prof.learning_rate = lr.value_or(prof.learning_rate);
        prof.spring = spring.value_or(prof.spring);
        const auto spec = circuit.build();
        const auto ends = points.load(2);
        check_dimensions(spec, ends);
        const auto parts = data.load();
        const qcl::qcl_objective objective(spec, parts.train, parts.test.view(), batch_size);
        std::uint64_t band_seed = seed;
        if (!points.ams_file.empty()) {
            const std::size_t i = points.members.empty() ? 0 : points.members[0];
            const std::size_t j = points.members.empty() ? 1 : points.members[1];
            band_seed = qcl::pair_seed(seed, i, j);
        }
        const auto result = qcl::neb_run(objective, ends[0], ends[1], prof, band_seed);
        const auto path = resolve_out(out, "neb.csv");
        qcl::write_neb_trace_csv(path, result);
        json side = qcl::neb_sidecar(result, batch_size, seed);
        side["band_seed"] = band_seed;
        side["epsilon"] = epsilon;
        side["connected"] = qcl::classify_connected(result.best_metrics, epsilon);
        side["circuit"] = qcl::to_json(spec);
        side["data"] = data.to_json();
        side["inputs"] = points.to_json(ends);
        side["tool"] = tool_info();
        qcl::write_json_file(sidecar_path(path), side);
        std::printf("max train loss %.5g -> %.5g, AUC %.5g -> %.5g (best step %zu, %s); wrote %s\n",
                    result.initial_metrics.max_loss, result.best_metrics.max_loss,
                    result.initial_metrics.auc, result.best_metrics.auc, result.best_step,
                    side["connected"].get<bool>() ? "connected" : "not connected",
                    path.string().c_str());
        return exit_ok;
    }
};

// ---------------------------------------------------------------------------
// cut1d / cut2d / dropout

struct cut1d_cmd {
    circuit_options circuit;
    data_options data;
    point_options points;
    std::size_t n_points = 50;
    std::uint64_t seed = 0;
    std::string out;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("cut1d", "Loss along the segment between two parameter vectors");
        circuit.add_to(cmd);
        data.add_to(cmd);
        points.add_to(cmd, 2);
        cmd->add_option("--points", n_points, "Samples on [0, 1]")->capture_default_str();
        cmd->add_option("--seed", seed, "Recorded in the sidecar; the cut is deterministic")
            ->capture_default_str();
        cmd->add_option("--out", out, "CSV (default $QCL_LANDSCAPE_OUT/cut1d.csv)");
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        const auto spec = circuit.build();
        const auto ends = points.load(2);
        check_dimensions(spec, ends);
        const auto cut = qcl::cut_1d(spec, ends[0], ends[1], n_points, data.load());
        const auto path = resolve_out(out, "cut1d.csv");
        qcl::write_cut_csv(path, cut);
        qcl::write_json_file(sidecar_path(path), {{"circuit", qcl::to_json(spec)},
                                                  {"data", data.to_json()},
                                                  {"inputs", points.to_json(ends)},
                                                  {"points", n_points},
                                                  {"seed", seed},
                                                  {"tool", tool_info()}});
        std::printf("wrote %s (%zu points)\n", path.string().c_str(), cut.size());
        return exit_ok;
    }
};

struct cut2d_cmd {
    circuit_options circuit;
    data_options data;
    point_options points;
    std::size_t resolution = 50;
    double padding = 0.25;
    bool with_test = false;
    std::uint64_t seed = 0;
    std::string out;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand("cut2d", "Loss on the plane through three parameter vectors");
        circuit.add_to(cmd);
        data.add_to(cmd);
        points.add_to(cmd, 3);
        cmd->add_option("--resolution", resolution, "Grid points per axis")->capture_default_str();
        cmd->add_option("--padding", padding, "Axis padding relative to the defining points' spread")
            ->capture_default_str();
        cmd->add_flag("--with-test", with_test, "Also evaluate the test loss");
        cmd->add_option("--seed", seed, "Recorded in the sidecar; the grid is deterministic")
            ->capture_default_str();
        cmd->add_option("--out", out, "CSV (default $QCL_LANDSCAPE_OUT/cut2d.csv)");
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        const auto spec = circuit.build();
        const auto pts = points.load(3);
        check_dimensions(spec, pts);
        const auto basis = qcl::plane_basis::through(pts[0], pts[1], pts[2]);
        const auto grid = qcl::cut_2d(spec, basis, qcl::default_axes(basis, resolution, padding),
                                      data.load(), with_test);
        const auto path = resolve_out(out, "cut2d.csv");
        qcl::write_grid_csv(path, grid);
        json side = qcl::grid_sidecar(grid);
        side["circuit"] = qcl::to_json(spec);
        side["data"] = data.to_json();
        side["seed"] = seed;
        side["tool"] = tool_info();
        qcl::write_json_file(sidecar_path(path), side);
        std::printf("wrote %s (%zu x %zu grid)\n", path.string().c_str(), grid.alphas.size(),
                    grid.betas.size());
        return exit_ok;
    }
};

struct dropout_cmd {
    circuit_options circuit;
    data_options data;
    point_options points;
    std::vector<std::size_t> indices;
    std::size_t n_points = 50;
    std::uint64_t seed = 0;
    std::string out;

    void add(CLI::App &app, std::function<int()> &run) {
        auto *cmd = app.add_subcommand(
            "dropout", "Train loss along a segment with and without parameters clamped to 0");
        circuit.add_to(cmd);
        data.add_to(cmd);
        points.add_to(cmd, 2);
        cmd->add_option("--indices", indices, "0-based parameter indices to clamp, e.g. 2,6")
            ->delimiter(',');
        cmd->add_option("--points", n_points, "Samples on [0, 1]")->capture_default_str();
        cmd->add_option("--seed", seed, "Recorded in the sidecar; the curves are deterministic")
            ->capture_default_str();
        cmd->add_option("--out", out, "CSV (default $QCL_LANDSCAPE_OUT/dropout.csv)");
        cmd->callback([this, &run] { run = [this] { return exec(); }; });
    }

    int exec() const {
        const auto spec = circuit.build();
        const auto ends = points.load(2);
        check_dimensions(spec, ends);
        const auto parts = data.load();
        const auto curve = qcl::dropout_curve(spec, ends[0], ends[1], indices, n_points, parts.train);
        const auto summary = qcl::summarize_dropout(curve);
        const auto path = resolve_out(out, "dropout.csv");
        qcl::write_dropout_csv(path, curve);
        qcl::write_json_file(sidecar_path(path), {{"circuit", qcl::to_json(spec)},
                                                  {"data", data.to_json()},
                                                  {"inputs", points.to_json(ends)},
                                                  {"indices", indices},
                                                  {"max_free", summary.max_free},
                                                  {"max_clamped", summary.max_clamped},
                                                  {"delta", summary.delta()},
                                                  {"seed", seed},
                                                  {"tool", tool_info()}});
        std::printf("max loss free %.5g, clamped %.5g (delta %+.5g); wrote %s\n", summary.max_free,
                    summary.max_clamped, summary.delta(), path.string().c_str());
        return exit_ok;
    }
};

int report_error(const char *kind, const std::exception &e, int code) {
    std::fprintf(stderr, "qcl-landscape: %s: %s\n", kind, e.what());
    return code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum circuit learning landscapes: data, sweeps, AMS, NEB, cuts, dropout",
                 "qcl-landscape"};
    app.set_version_flag("--version", QCL_VERSION);
    app.require_subcommand(1);

    std::function<int()> run;
    gen_data_cmd gen_data;
    sweep_cmd sweep;
    report_cmd report;
    ams_cmd ams;
    neb_cmd neb;
    cut1d_cmd cut1d;
    cut2d_cmd cut2d;
    dropout_cmd dropout;
    gen_data.add(app, run);
    sweep.add(app, run);
    report.add(app, run);
    ams.add(app, run);
    neb.add(app, run);
    cut1d.add(app, run);
    cut2d.add(app, run);
    dropout.add(app, run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        return run ? run() : exit_config;
    } catch (const qcl::parse_error &e) {
        return report_error("parse error", e, exit_config);
    } catch (const qcl::config_error &e) {
        return report_error("config error", e, exit_config);
    } catch (const qcl::index_error &e) {
        return report_error("index error", e, exit_config);
    } catch (const qcl::shape_error &e) {
        return report_error("shape error", e, exit_config);
    } catch (const qcl::domain_error &e) {
        return report_error("domain error", e, exit_config);
    } catch (const qcl::io_error &e) {
        return report_error("io error", e, exit_io);
    } catch (const qcl::degeneracy_error &e) {
        return report_error("degenerate geometry", e, exit_numerical);
    } catch (const qcl::numerical_error &e) {
        return report_error("numerical error", e, exit_numerical);
    } catch (const std::exception &e) {
        return report_error("internal error", e, exit_internal);
    }
}
