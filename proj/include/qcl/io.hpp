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

/**
 * @file
 * File formats.
 *
 *  dataset CSV      x,y,split            split in {train, test}
 *  run records      JSONL, one train_record per line
 *  grid CSV         alpha,beta,train_loss[,test_loss] + JSON sidecar (basis)
 *  cut CSV          alpha,train_loss,test_loss
 *  dropout CSV      alpha,loss_free,loss_clamped
 *  NEB trace CSV    step,pivot_index,loss_train[,loss_test] + JSON sidecar
 *  AMS JSON         [{center, test_mse, cluster_size}, ...]
 *
 * Qubit 0 is the least-significant bit of a basis index, and the model reads
 * out <Z> on qubit 1. Parameter indices are 0-based. CSV numbers use 17
 * significant digits; JSON numbers use the shortest round-trip form.
 */

#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "qcl/ansatz.hpp"
#include "qcl/connectivity.hpp"
#include "qcl/errors.hpp"
#include "qcl/harness.hpp"
#include "qcl/landscape.hpp"
#include "qcl/optim.hpp"

namespace qcl {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers

inline json to_json_array(const param_vector &v) {
    json out = json::array();
    for (const double x : v) {
        out.push_back(x);
    }
    return out;
}

inline param_vector param_vector_from_json(const json &j, const std::string &field) {
    if (!j.is_array()) {
        throw parse_error("field '" + field + "' must be an array of numbers");
    }
    param_vector out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw parse_error("field '" + field + "[" + std::to_string(i) + "]' is not a number");
        }
        out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return out;
}

/// Parses a JSON text, turning syntax errors into parse_error with a line number.
inline json parse_json_text(const std::string &text, const std::string &origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw parse_error(origin + ":" + std::to_string(line) + ": " + e.what());
    }
}

inline std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open '" + path.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline json read_json_file(const std::filesystem::path &path) {
    return parse_json_text(read_text_file(path), path.string());
}

inline std::ofstream open_for_write(const std::filesystem::path &path,
                                    std::ios::openmode mode = std::ios::trunc) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::out | mode);
    if (!out) {
        throw io_error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

inline void write_json_file(const std::filesystem::path &path, const json &j) {
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
    if (!out) {
        throw io_error("failed writing '" + path.string() + "'");
    }
}

namespace detail {
/// Typed accessor that names the offending key on failure.
template <class T> T get_field(const json &j, const std::string &key, const std::string &where) {
    if (!j.contains(key)) {
        throw parse_error(where + ": missing key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw parse_error(where + ": key '" + key + "' has the wrong type");
    }
}

template <class T>
T get_field_or(const json &j, const std::string &key, T fallback, const std::string &where) {
    return j.contains(key) ? get_field<T>(j, key, where) : fallback;
}

inline void reject_unknown_keys(const json &j, const std::set<std::string> &allowed,
                                const std::string &where) {
    for (const auto &[key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw parse_error(where + ": unknown key '" + key + "'");
        }
    }
}

template <class Fn> auto wrap_config(const std::string &where, Fn &&fn) {
    try {
        return fn();
    } catch (const parse_error &) {
        throw;
    } catch (const config_error &e) {
        throw parse_error(where + ": " + e.what());
    }
}
} // namespace detail

// ---------------------------------------------------------------------------
// Configs and records

inline json to_json(const circuit_spec &spec) {
    json j{{"n_qubits", spec.n_qubits()},
           {"depth", spec.depth()},
           {"param_count", spec.param_count()},
           {"measured_qubit", spec.measured_qubit()},
           {"encoding", to_string(spec.encoding())}};
    j["layout"] = spec.layout() ? json(to_string(*spec.layout())) : json(nullptr);
    return j;
}

inline json to_json(const init_scheme &s) {
    if (s.type == init_scheme::kind::uniform) {
        return {{"kind", "uniform"}, {"low", 0.0}, {"high", 2.0 * std::numbers::pi}};
    }
    return {{"kind", "gaussian"}, {"mean", s.mean}, {"sigma", s.sigma}};
}

inline init_scheme init_scheme_from_json(const json &j, const std::string &where) {
    if (!j.is_object()) {
        throw parse_error(where + ": init scheme must be an object");
    }
    const auto kind = detail::get_field<std::string>(j, "kind", where);
    if (kind == "uniform") {
        return init_scheme::uniform();
    }
    if (kind == "gaussian") {
        return init_scheme::gaussian(detail::get_field<double>(j, "mean", where),
                                     detail::get_field_or<double>(j, "sigma", qubit_glorot_sigma, where));
    }
    throw parse_error(where + ": unknown init kind '" + kind + "'");
}

inline json to_json(const optimizer_settings &o) {
    return {{"kind", to_string(o.kind)},
            {"learning_rate", o.learning_rate},
            {"beta1", o.beta1},
            {"beta2", o.beta2},
            {"adam_epsilon", o.adam_epsilon},
            {"qng_regularizer", o.qng_regularizer},
            {"qng_metric", to_string(o.metric)}};
}

inline optimizer_settings optimizer_settings_from_json(const json &j, const std::string &where) {
    return detail::wrap_config(where, [&] {
        optimizer_settings o;
        o.kind = parse_optimizer(detail::get_field<std::string>(j, "kind", where));
        o.learning_rate = detail::get_field_or(j, "learning_rate", o.learning_rate, where);
        o.beta1 = detail::get_field_or(j, "beta1", o.beta1, where);
        o.beta2 = detail::get_field_or(j, "beta2", o.beta2, where);
        o.adam_epsilon = detail::get_field_or(j, "adam_epsilon", o.adam_epsilon, where);
        o.qng_regularizer = detail::get_field_or(j, "qng_regularizer", o.qng_regularizer, where);
        o.metric = parse_metric_approximation(
            detail::get_field_or<std::string>(j, "qng_metric", to_string(o.metric), where));
        return o;
    });
}

inline json to_json(const train_config &c) {
    return {{"circuit", to_json(circuit_for(c))},
            {"optimizer", to_json(c.optimizer)},
            {"steps", c.steps},
            {"batch_size", c.batch_size},
            {"init", to_json(c.init)},
            {"seed", c.seed},
            {"data_seed", c.data_seed},
            {"hash", config_hash(c)}};
}

inline train_config train_config_from_json(const json &j, const std::string &where) {
    return detail::wrap_config(where, [&] {
        train_config c;
        const auto circuit = detail::get_field<json>(j, "circuit", where);
        c.layout = parse_layout(detail::get_field<std::string>(circuit, "layout", where + ".circuit"));
        c.depth = detail::get_field<std::size_t>(circuit, "depth", where + ".circuit");
        c.n_qubits = detail::get_field_or<std::size_t>(circuit, "n_qubits", 3, where + ".circuit");
        c.encoding = parse_encoding_order(
            detail::get_field_or<std::string>(circuit, "encoding", "rz_first", where + ".circuit"));
        c.optimizer = optimizer_settings_from_json(detail::get_field<json>(j, "optimizer", where),
                                                   where + ".optimizer");
        c.steps = detail::get_field<std::size_t>(j, "steps", where);
        c.batch_size = detail::get_field<std::size_t>(j, "batch_size", where);
        c.init = init_scheme_from_json(detail::get_field<json>(j, "init", where), where + ".init");
        c.seed = detail::get_field<std::uint64_t>(j, "seed", where);
        c.data_seed = detail::get_field_or<std::uint64_t>(j, "data_seed", 0, where);
        return c;
    });
}

inline json to_json(const train_record &r) {
    return {{"config", to_json(r.config)},
            {"theta_init", to_json_array(r.theta_init)},
            {"theta_final", to_json_array(r.theta_final)},
            {"train_loss", r.train_loss},
            {"test_mse", r.test_mse},
            {"best_test_mse", r.best_test_mse},
            {"best_step", r.best_step},
            {"seed", r.config.seed},
            {"duration_s", r.duration_s}};
}

inline train_record train_record_from_json(const json &j, const std::string &where) {
    train_record r;
    r.config = train_config_from_json(detail::get_field<json>(j, "config", where), where + ".config");
    r.theta_init = param_vector_from_json(detail::get_field<json>(j, "theta_init", where), "theta_init");
    r.theta_final = param_vector_from_json(detail::get_field<json>(j, "theta_final", where), "theta_final");
    r.train_loss = detail::get_field<std::vector<double>>(j, "train_loss", where);
    r.test_mse = detail::get_field<std::vector<double>>(j, "test_mse", where);
    r.best_test_mse = detail::get_field<double>(j, "best_test_mse", where);
    r.best_step = detail::get_field<std::size_t>(j, "best_step", where);
    r.duration_s = detail::get_field_or<double>(j, "duration_s", 0.0, where);
    return r;
}

/// Reads a JSONL record file. A final line without a newline is treated as an
/// interrupted write and skipped.
inline std::vector<train_record> read_records(const std::filesystem::path &path) {
    const std::string text = read_text_file(path);
    std::vector<train_record> out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        ++line_no;
        if (end == std::string::npos) {
            break; // truncated tail
        }
        const std::string line = text.substr(start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        out.push_back(train_record_from_json(parse_json_text(line, where), where));
    }
    return out;
}

/// Drops a partially written last line so appends start on a fresh line.
inline void repair_jsonl_tail(const std::filesystem::path &path) {
    if (!std::filesystem::exists(path)) {
        return;
    }
    const std::string text = read_text_file(path);
    const auto last_newline = text.rfind('\n');
    const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (keep != text.size()) {
        std::filesystem::resize_file(path, keep);
    }
}

inline std::unordered_set<std::string> completed_hashes(std::span<const train_record> records) {
    std::unordered_set<std::string> out;
    for (const auto &r : records) {
        out.insert(config_hash(r.config));
    }
    return out;
}

/**
 * Sweep configuration document. Every key is optional except the grid axes:
 *
 *   layouts, depths, optimizers       grid axes (required)
 *   inits            "standard" or a list of {kind, mean, sigma}
 *   batch_sizes      default [1, 2, 4, 8, 16, 32]
 *   seeds            default [0]
 *   data_seed, split_ratio, n_qubits, encoding, steps, learning_rate,
 *   adam {beta1, beta2, epsilon}, qng {regularizer, metric}, record_timing
 */
struct sweep_config {
    sweep_grid grid;
    double split_ratio = 0.8;
    bool record_timing = false; // wall-clock durations make records irreproducible
};

inline sweep_config sweep_config_from_json(const json &j, const std::string &where) {
    if (!j.is_object()) {
        throw parse_error(where + ": sweep config must be a JSON object");
    }
    detail::reject_unknown_keys(j,
                                {"layouts", "depths", "optimizers", "inits", "batch_sizes", "seeds",
                                 "data_seed", "split_ratio", "n_qubits", "encoding", "steps",
                                 "learning_rate",
                                 "adam", "qng", "record_timing"},
                                where);
    return detail::wrap_config(where, [&] {
        sweep_config cfg;
        auto &g = cfg.grid;
        for (const auto &name : detail::get_field<std::vector<std::string>>(j, "layouts", where)) {
            g.layouts.push_back(parse_layout(name));
        }
        g.depths = detail::get_field<std::vector<std::size_t>>(j, "depths", where);
        for (const auto &name : detail::get_field<std::vector<std::string>>(j, "optimizers", where)) {
            g.optimizers.push_back(parse_optimizer(name));
        }
        if (j.contains("inits")) {
            const auto &inits = j.at("inits");
            if (inits.is_string() && inits.get<std::string>() == "standard") {
                g.inits = standard_init_schemes();
            } else if (inits.is_array()) {
                g.inits.clear();
                for (std::size_t i = 0; i < inits.size(); ++i) {
                    g.inits.push_back(
                        init_scheme_from_json(inits[i], where + ".inits[" + std::to_string(i) + "]"));
                }
            } else {
                throw parse_error(where + ": key 'inits' must be \"standard\" or an array");
            }
        }
        g.batch_sizes = detail::get_field_or(j, "batch_sizes", g.batch_sizes, where);
        g.seeds = detail::get_field_or(j, "seeds", g.seeds, where);
        auto &base = g.base;
        base.data_seed = detail::get_field_or<std::uint64_t>(j, "data_seed", 0, where);
        base.n_qubits = detail::get_field_or<std::size_t>(j, "n_qubits", 3, where);
        base.encoding = parse_encoding_order(
            detail::get_field_or<std::string>(j, "encoding", to_string(base.encoding), where));
        base.steps = detail::get_field_or<std::size_t>(j, "steps", 300, where);
        base.optimizer.learning_rate =
            detail::get_field_or(j, "learning_rate", base.optimizer.learning_rate, where);
        if (j.contains("adam")) {
            const auto &a = j.at("adam");
            detail::reject_unknown_keys(a, {"beta1", "beta2", "epsilon"}, where + ".adam");
            base.optimizer.beta1 = detail::get_field_or(a, "beta1", base.optimizer.beta1, where + ".adam");
            base.optimizer.beta2 = detail::get_field_or(a, "beta2", base.optimizer.beta2, where + ".adam");
            base.optimizer.adam_epsilon =
                detail::get_field_or(a, "epsilon", base.optimizer.adam_epsilon, where + ".adam");
        }
        if (j.contains("qng")) {
            const auto &q = j.at("qng");
            detail::reject_unknown_keys(q, {"regularizer", "metric"}, where + ".qng");
            base.optimizer.qng_regularizer =
                detail::get_field_or(q, "regularizer", base.optimizer.qng_regularizer, where + ".qng");
            base.optimizer.metric = parse_metric_approximation(detail::get_field_or<std::string>(
                q, "metric", to_string(base.optimizer.metric), where + ".qng"));
        }
        cfg.split_ratio = detail::get_field_or(j, "split_ratio", cfg.split_ratio, where);
        cfg.record_timing = detail::get_field_or(j, "record_timing", cfg.record_timing, where);
        expand(g); // validates every run, including an empty grid
        return cfg;
    });
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {
inline void check_stream(const std::ofstream &out, const std::filesystem::path &path) {
    if (!out) {
        throw io_error("failed writing '" + path.string() + "'");
    }
}
} // namespace detail

inline void write_dataset_csv(const std::filesystem::path &path, const dataset &data,
                              const data_split &parts) {
    if (parts.is_train.size() != data.size()) {
        throw shape_error("split does not match dataset size");
    }
    auto out = open_for_write(path);
    out << "x,y,split\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << format_double(data.xs[i]) << ',' << format_double(data.ys[i]) << ','
            << (parts.is_train[i] ? "train" : "test") << '\n';
    }
    detail::check_stream(out, path);
}

struct loaded_dataset {
    dataset data;
    data_split parts;
};

inline loaded_dataset read_dataset_csv(const std::filesystem::path &path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line.rfind("x,y,split", 0) != 0) {
        throw parse_error(path.string() + ":1: expected header 'x,y,split'");
    }
    loaded_dataset out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto where = path.string() + ":" + std::to_string(line_no);
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw parse_error(where + ": expected 3 columns");
        }
        double x = 0.0;
        double y = 0.0;
        try {
            x = std::stod(line.substr(0, c1));
            y = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        } catch (const std::exception &) {
            throw parse_error(where + ": x or y is not a number");
        }
        const std::string tag = line.substr(c2 + 1);
        if (tag != "train" && tag != "test") {
            throw parse_error(where + ": split must be 'train' or 'test', got '" + tag + "'");
        }
        out.data.xs.push_back(x);
        out.data.ys.push_back(y);
        out.parts.is_train.push_back(tag == "train");
        (tag == "train" ? out.parts.train : out.parts.test).push_back(x, y);
    }
    if (out.parts.train.empty() || out.parts.test.empty()) {
        throw parse_error(path.string() + ": dataset needs both train and test rows");
    }
    return out;
}

inline void write_cut_csv(const std::filesystem::path &path, std::span<const cut_point> cut) {
    auto out = open_for_write(path);
    out << "alpha,train_loss,test_loss\n";
    for (const auto &p : cut) {
        out << format_double(p.alpha) << ',' << format_double(p.train_loss) << ','
            << format_double(p.test_loss) << '\n';
    }
    detail::check_stream(out, path);
}

inline void write_dropout_csv(const std::filesystem::path &path,
                              std::span<const dropout_point> curve) {
    auto out = open_for_write(path);
    out << "alpha,loss_free,loss_clamped\n";
    for (const auto &p : curve) {
        out << format_double(p.alpha) << ',' << format_double(p.loss_free) << ','
            << format_double(p.loss_clamped) << '\n';
    }
    detail::check_stream(out, path);
}

inline void write_grid_csv(const std::filesystem::path &path, const landscape_grid &grid) {
    auto out = open_for_write(path);
    out << "alpha,beta,train_loss" << (grid.test_losses ? ",test_loss" : "") << '\n';
    for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
        for (std::size_t j = 0; j < grid.betas.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            out << format_double(grid.alphas[i]) << ',' << format_double(grid.betas[j]) << ','
                << format_double(grid.train_losses(ii, jj));
            if (grid.test_losses) {
                out << ',' << format_double((*grid.test_losses)(ii, jj));
            }
            out << '\n';
        }
    }
    detail::check_stream(out, path);
}

inline json grid_sidecar(const landscape_grid &grid) {
    const auto &b = grid.basis;
    return {{"origin", to_json_array(b.origin())},
            {"w1", to_json_array(b.w1())},
            {"w2", to_json_array(b.w2())},
            {"w1_orientation", "theta_B - theta_A (theta_B at positive alpha)"},
            {"theta_a", to_json_array(b.origin())},
            {"theta_b", to_json_array(b.point_b())},
            {"theta_c", to_json_array(b.point_c())},
            {"theta_b_coords", {b.scale1(), 0.0}},
            {"theta_c_coords", {b.c_alpha(), b.scale2()}},
            {"alpha_points", grid.alphas.size()},
            {"beta_points", grid.betas.size()}};
}

inline void write_neb_trace_csv(const std::filesystem::path &path, const neb_result &run) {
    auto out = open_for_write(path);
    const bool with_test = !run.test_history.empty();
    out << "step,pivot_index,loss_train" << (with_test ? ",loss_test" : "") << '\n';
    for (std::size_t s = 0; s < run.train_history.size(); ++s) {
        for (std::size_t p = 0; p < run.train_history[s].size(); ++p) {
            out << s << ',' << p << ',' << format_double(run.train_history[s][p]);
            if (with_test) {
                out << ',' << format_double(run.test_history[s][p]);
            }
            out << '\n';
        }
    }
    detail::check_stream(out, path);
}

inline json to_json(const path_metrics &m) {
    return {{"max_loss", m.max_loss},
            {"auc", m.auc},
            {"endpoint_ratio", m.endpoint_ratio},
            {"loss_a", m.loss_a},
            {"loss_b", m.loss_b}};
}

inline json neb_sidecar(const neb_result &run, std::size_t batch_size, std::uint64_t seed) {
    auto band = [](const neb_path &p) {
        json arr = json::array();
        for (const auto &v : p.pivots) {
            arr.push_back(to_json_array(v));
        }
        return arr;
    };
    json j{{"profile", run.profile.name},
           {"pivots", run.profile.pivots},
           {"steps", run.profile.steps},
           {"lr", run.profile.learning_rate},
           {"k", run.profile.spring},
           {"batch_size", batch_size},
           {"seed", seed},
           {"best_step", run.best_step},
           {"initial_path", band(run.initial)},
           {"best_path", band(run.best)},
           {"initial_metrics", to_json(run.initial_metrics)},
           {"best_metrics", to_json(run.best_metrics)}};
    if (run.best_test_metrics) {
        j["initial_test_metrics"] = to_json(*run.initial_test_metrics);
        j["best_test_metrics"] = to_json(*run.best_test_metrics);
    }
    return j;
}

inline json to_json(const ams_result &ams) {
    json members = json::array();
    for (const auto &m : ams.members) {
        members.push_back({{"center", to_json_array(m.center)},
                           {"test_mse", m.test_mse},
                           {"cluster_size", m.cluster_size}});
    }
    return members;
}

inline std::vector<ams_member> ams_from_json(const json &j, const std::string &where) {
    if (!j.is_array()) {
        throw parse_error(where + ": AMS file must be a JSON array");
    }
    std::vector<ams_member> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto at = where + "[" + std::to_string(i) + "]";
        ams_member m;
        m.center = param_vector_from_json(detail::get_field<json>(j[i], "center", at), at + ".center");
        m.test_mse = detail::get_field<double>(j[i], "test_mse", at);
        m.cluster_size = detail::get_field<std::size_t>(j[i], "cluster_size", at);
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace qcl
