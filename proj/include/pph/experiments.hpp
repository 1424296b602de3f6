#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pph/embedding.hpp"
#include "pph/io.hpp"
#include "pph/oracle.hpp"
#include "pph/search.hpp"
#include "pph/security.hpp"
#include "pph/stats.hpp"

namespace pph {

// Configuration problems are reported before any computation starts and map
// to exit code 2 in the CLI; everything else that goes wrong at run time maps
// to exit code 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- Embedding-backed threshold oracle ----

// Eval := [dist_estimate > t]. Connects the hash construction back to the
// binary-search estimators with zero interaction per query.
inline bool embedding_threshold_oracle(const PublicParams& params, const HashOutput& ha,
                                       const HashOutput& hb, std::uint64_t t) {
    return dist_estimate(params, ha, hb) > static_cast<double>(t);
}

// Session adapter so the search algorithms can run over a hash pair. The
// answer at each threshold is deterministic; repetitions only add accounting.
class EmbeddingOracleSession {
public:
    EmbeddingOracleSession(const PublicParams& params, const HashOutput& ha,
                           const HashOutput& hb)
        : n_(params.n), estimate_(dist_estimate(params, ha, hb)) {}

    bool eval(std::uint64_t t) {
        if (t > n_) throw std::out_of_range("EmbeddingOracleSession::eval: t out of range");
        ++query_count_;
        return estimate_ > static_cast<double>(t);
    }

    bool majority_eval(std::uint64_t t, std::uint64_t k) {
        if (k == 0 || k % 2 == 0) {
            throw std::invalid_argument("majority_eval: k must be a positive odd integer");
        }
        bool last = false;
        for (std::uint64_t i = 0; i < k; ++i) last = eval(t);
        return last;
    }

    std::uint64_t n() const { return n_; }
    std::uint64_t query_count() const { return query_count_; }

private:
    std::uint64_t n_;
    double estimate_;
    std::uint64_t query_count_ = 0;
};

// ---- Experiment configuration ----

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::size_t trials = 0;

    // search-bench
    std::string algorithm;  // naive | amplified | constant
    std::vector<std::uint64_t> ns;
    bool exact_model = true;
    ErrorModel model;
    std::optional<double> delta;  // per-call error assumed by the reps formula
    double epsilon = 0.0;
    std::uint64_t k = 1;

    // embed-bench / security-game
    std::size_t n = 0;
    std::optional<std::size_t> m;
    std::optional<std::size_t> r;
    std::vector<std::uint64_t> ds;
    std::vector<double> epsilons;
    std::string mode = "full";  // full | subsampled | calibrated
    std::size_t s = 0;
    std::size_t calibration_trials = 2000;

    // security-game
    std::string challenge = "lambda-bias";  // lambda-bias | uniform
    double lambda = 0.0;
    std::size_t training_samples = 4000;

    std::size_t resolved_r() const { return r ? *r : recommended_r(n); }
    std::size_t resolved_m() const { return m ? *m : recommended_m(n, resolved_r()); }
};

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
    }
}

template <typename T>
void optional_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
    }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.command = detail::require_field<std::string>(j, "command");
    detail::optional_field(j, "seed", cfg.seed);
    detail::optional_field(j, "trials", cfg.trials);

    if (cfg.command == "search-bench") {
        cfg.algorithm = detail::require_field<std::string>(j, "algorithm");
        cfg.ns = detail::require_field<std::vector<std::uint64_t>>(j, "ns");
        if (!j.contains("model")) throw ConfigError("config: missing field 'model'");
        const auto& model = j.at("model");
        if (model.is_string() && model.get<std::string>() == "exact") {
            cfg.exact_model = true;
        } else if (model.is_object()) {
            cfg.exact_model = false;
            cfg.model.delta_max = detail::require_field<double>(model, "delta_max");
            cfg.model.delta_far = detail::require_field<double>(model, "delta_far");
            cfg.model.tau = detail::require_field<std::uint64_t>(model, "tau");
        } else {
            throw ConfigError("config: 'model' must be \"exact\" or an object");
        }
        if (j.contains("delta")) {
            double d = 0.0;
            detail::optional_field(j, "delta", d);
            cfg.delta = d;
        }
        detail::optional_field(j, "epsilon", cfg.epsilon);
        detail::optional_field(j, "k", cfg.k);
    } else if (cfg.command == "embed-bench") {
        cfg.n = detail::require_field<std::size_t>(j, "n");
        if (j.contains("m")) cfg.m = detail::require_field<std::size_t>(j, "m");
        if (j.contains("r")) cfg.r = detail::require_field<std::size_t>(j, "r");
        cfg.ds = detail::require_field<std::vector<std::uint64_t>>(j, "ds");
        cfg.epsilons = detail::require_field<std::vector<double>>(j, "epsilons");
        detail::optional_field(j, "mode", cfg.mode);
        detail::optional_field(j, "s", cfg.s);
        detail::optional_field(j, "calibration_trials", cfg.calibration_trials);
    } else if (cfg.command == "security-game") {
        cfg.n = detail::require_field<std::size_t>(j, "n");
        if (j.contains("m")) cfg.m = detail::require_field<std::size_t>(j, "m");
        if (j.contains("r")) cfg.r = detail::require_field<std::size_t>(j, "r");
        detail::optional_field(j, "challenge", cfg.challenge);
        detail::optional_field(j, "lambda", cfg.lambda);
        detail::optional_field(j, "training_samples", cfg.training_samples);
    } else {
        throw ConfigError("config: unknown command '" + cfg.command + "'");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// Every downstream precondition is checked here, before any work begins.
inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("config: trials must be >= 1");

    if (cfg.command == "search-bench") {
        if (cfg.ns.empty()) throw ConfigError("config: ns must be non-empty");
        for (const auto n : cfg.ns) {
            if (n == 0) throw ConfigError("config: every n must be >= 1");
        }
        if (!cfg.exact_model) {
            try {
                cfg.model.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
        if (cfg.algorithm == "naive") {
            if (cfg.k != 1) throw ConfigError("config: naive search uses k = 1");
        } else if (cfg.algorithm == "amplified") {
            if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
                throw ConfigError("config: epsilon must be in (0, 1)");
            }
            const double delta = cfg.delta ? *cfg.delta
                                           : (cfg.exact_model ? 0.0 : cfg.model.delta_max);
            if (!(delta >= 0.0 && delta < 0.5)) {
                throw ConfigError("config: delta must be in [0, 1/2)");
            }
            for (const auto n : cfg.ns) {
                if (n < 4) throw ConfigError("config: amplified search requires n >= 4");
            }
        } else if (cfg.algorithm == "constant") {
            if (cfg.k == 0 || cfg.k % 2 == 0) {
                throw ConfigError("config: k must be a positive odd integer");
            }
        } else {
            throw ConfigError("config: unknown algorithm '" + cfg.algorithm + "'");
        }
    } else if (cfg.command == "embed-bench") {
        if (cfg.n == 0) throw ConfigError("config: n must be >= 1");
        const std::size_t r = cfg.resolved_r();
        const std::size_t m = cfg.resolved_m();
        if (r == 0) throw ConfigError("config: r must be >= 1");
        if (m < 2 * r) throw ConfigError("config: m must be at least 2r");
        if (cfg.ds.empty()) throw ConfigError("config: ds must be non-empty");
        for (const auto d : cfg.ds) {
            if (d > cfg.n) throw ConfigError("config: every d must be <= n");
        }
        for (const auto eps : cfg.epsilons) {
            if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("config: epsilons must be in (0, 1)");
        }
        if (cfg.mode == "subsampled") {
            if (cfg.s == 0 || cfg.s > m) throw ConfigError("config: s must be in [1, m]");
        } else if (cfg.mode == "calibrated") {
            if (cfg.calibration_trials == 0) {
                throw ConfigError("config: calibration_trials must be >= 1");
            }
        } else if (cfg.mode != "full") {
            throw ConfigError("config: unknown mode '" + cfg.mode + "'");
        }
    } else if (cfg.command == "security-game") {
        if (cfg.n == 0) throw ConfigError("config: n must be >= 1");
        const std::size_t r = cfg.resolved_r();
        if (r == 0) throw ConfigError("config: r must be >= 1");
        if (cfg.resolved_m() < 2 * r) throw ConfigError("config: m must be at least 2r");
        if (cfg.challenge == "lambda-bias") {
            if (!(cfg.lambda >= 2.0)) {
                throw ConfigError(
                    "config: lambda must be >= 2 (bias 1/2 + 2^-lambda must satisfy the "
                    "min-entropy cap)");
            }
        } else if (cfg.challenge != "uniform") {
            throw ConfigError("config: unknown challenge '" + cfg.challenge + "'");
        }
        if (cfg.training_samples == 0) throw ConfigError("config: training_samples must be >= 1");
    } else {
        throw ConfigError("config: unknown command '" + cfg.command + "'");
    }
}

// ---- Results ----

struct ExperimentResult {
    CsvTable rows;
    nlohmann::json summary;
};

inline void save_result(const std::string& base_path, const ExperimentResult& result) {
    write_text_file(base_path + ".csv", result.rows.to_string());
    write_text_file(base_path + ".json", result.summary.dump(2) + "\n");
}

inline ExperimentResult load_result(const std::string& base_path) {
    ExperimentResult result;
    result.rows = CsvTable::parse(read_text_file(base_path + ".csv"));
    try {
        result.summary = nlohmann::json::parse(read_text_file(base_path + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("summary " + base_path + ".json: " + e.what());
    }
    return result;
}

// ---- search-bench ----

inline ExperimentResult cmd_search_bench(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentResult result;
    result.rows.header = {"n", "true_d", "estimate", "reps", "oracle_calls", "failed"};
    nlohmann::json per_n = nlohmann::json::array();

    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
        const std::uint64_t n = cfg.ns[ni];
        std::size_t failures = 0;
        double total_calls = 0.0;
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t stream = mix64(mix64(cfg.seed, ni), trial);
            const auto d = mix64(stream, 0) % (n + 1);
            OracleSession session =
                cfg.exact_model ? OracleSession::exact(n, d)
                                : OracleSession::noisy(n, d, cfg.model, mix64(stream, 1));
            SearchReport report;
            if (cfg.algorithm == "naive") {
                report = binary_search_distance(session, n, 1);
            } else if (cfg.algorithm == "amplified") {
                const double delta =
                    cfg.delta ? *cfg.delta : (cfg.exact_model ? 0.0 : cfg.model.delta_max);
                report = amplified_search(session, n, delta, cfg.epsilon);
            } else {
                report = constant_rep_search(session, n, cfg.k);
            }
            const bool failed = report.estimate != d;
            if (failed) ++failures;
            total_calls += static_cast<double>(report.oracle_calls);
            result.rows.rows.push_back({std::to_string(n), std::to_string(d),
                                        std::to_string(report.estimate),
                                        std::to_string(report.reps_per_threshold),
                                        std::to_string(report.oracle_calls),
                                        failed ? "1" : "0"});
        }
        const double failure_rate = static_cast<double>(failures) / static_cast<double>(cfg.trials);

        double bound = 0.0;
        const auto depth = static_cast<double>(search_depth_bound(n));
        if (cfg.algorithm == "naive") {
            bound = cfg.exact_model ? 0.0 : std::min(1.0, depth * cfg.model.delta_max);
        } else if (cfg.algorithm == "amplified") {
            bound = cfg.epsilon;
        } else {
            bound = cfg.exact_model
                        ? 0.0
                        : constant_rep_failure_bound(cfg.model.tau, cfg.k, cfg.model.gamma());
        }

        per_n.push_back({{"n", n},
                         {"trials", cfg.trials},
                         {"failures", failures},
                         {"failure_rate", failure_rate},
                         {"mean_oracle_calls", total_calls / static_cast<double>(cfg.trials)},
                         {"ci_halfwidth", binomial_halfwidth(failure_rate, cfg.trials)},
                         {"analytic_bound", bound}});
    }

    result.summary = {{"schema_version", kSchemaVersion},
                      {"command", "search-bench"},
                      {"algorithm", cfg.algorithm},
                      {"seed", cfg.seed},
                      {"trials", cfg.trials},
                      {"per_n", per_n}};
    return result;
}

// ---- embed-bench ----

inline ExperimentResult cmd_embed_bench(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::size_t r = cfg.resolved_r();
    const std::size_t m = cfg.resolved_m();
    PublicParams params = setup(cfg.n, m, r, mix64(cfg.seed, 0x10));
    if (cfg.mode == "calibrated") {
        params = with_calibrated_alpha(
            params, calibrate_alpha(params, cfg.calibration_trials, mix64(cfg.seed, 0x20)));
    }

    ExperimentResult result;
    const bool subsampled = cfg.mode == "subsampled";
    result.rows.header = {"n", "trial", "true_d", "estimate", "abs_err"};
    if (subsampled) result.rows.header.push_back("full_estimate");

    nlohmann::json per_d = nlohmann::json::array();
    for (std::size_t di = 0; di < cfg.ds.size(); ++di) {
        const std::uint64_t d = cfg.ds[di];
        double sum_est = 0.0, sum_abs = 0.0, sum_sq = 0.0;
        double sum_full = 0.0, sum_full_sq = 0.0;
        std::vector<std::size_t> exceed(cfg.epsilons.size(), 0);
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t stream = mix64(mix64(cfg.seed, 0x1000 + di), trial);
            const BitVector x = sample(InputDistribution::uniform(), cfg.n, mix64(stream, 1));
            const BitVector y = flip_k(x, d, mix64(stream, 2));
            const HashOutput hx = hash(params, x);
            const HashOutput hy = hash(params, y);
            const double full = dist_estimate(params, hx, hy);
            const double est =
                subsampled ? subsampled_estimate(params, hx, hy, cfg.s, mix64(stream, 3)) : full;
            const double abs_err = std::abs(est - static_cast<double>(d));
            sum_est += est;
            sum_abs += abs_err;
            sum_sq += est * est;
            if (subsampled) {
                sum_full += full;
                sum_full_sq += full * full;
            }
            for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
                if (abs_err > cfg.epsilons[ei] * static_cast<double>(cfg.n)) ++exceed[ei];
            }
            std::vector<std::string> row = {std::to_string(cfg.n), std::to_string(trial),
                                            std::to_string(d), format_double(est),
                                            format_double(abs_err)};
            if (subsampled) row.push_back(format_double(full));
            result.rows.rows.push_back(std::move(row));
        }
        const auto trials = static_cast<double>(cfg.trials);
        nlohmann::json exceedance = nlohmann::json::array();
        for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
            exceedance.push_back({{"epsilon", cfg.epsilons[ei]},
                                  {"count", exceed[ei]},
                                  {"rate", static_cast<double>(exceed[ei]) / trials}});
        }
        nlohmann::json entry = {{"d", d},
                                {"trials", cfg.trials},
                                {"mean_estimate", sum_est / trials},
                                {"mean_abs_err", sum_abs / trials},
                                {"exceedance", exceedance}};
        if (cfg.trials > 1) {
            const double var =
                (sum_sq - sum_est * sum_est / trials) / (trials - 1.0);
            entry["variance"] = var;
            if (subsampled) {
                entry["variance_full"] =
                    (sum_full_sq - sum_full * sum_full / trials) / (trials - 1.0);
            }
        }
        per_d.push_back(std::move(entry));
    }

    result.summary = {{"schema_version", kSchemaVersion},
                      {"command", "embed-bench"},
                      {"seed", cfg.seed},
                      {"trials", cfg.trials},
                      {"n", cfg.n},
                      {"m", m},
                      {"r", r},
                      {"rho", params.rho},
                      {"alpha", params.alpha},
                      {"alpha_analytic", analytic_alpha(cfg.n, m, r)},
                      {"alpha_source", to_string(params.alpha_source)},
                      {"mode", cfg.mode},
                      {"per_d", per_d}};
    if (subsampled) result.summary["s"] = cfg.s;
    return result;
}

// ---- security-game ----

inline ExperimentResult cmd_security_game(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::size_t r = cfg.resolved_r();
    const std::size_t m = cfg.resolved_m();
    const PublicParams params = setup(cfg.n, m, r, mix64(cfg.seed, 0x30));

    const bool biased = cfg.challenge == "lambda-bias";
    const InputDistribution challenge =
        biased ? InputDistribution::bias_for_lambda(cfg.n, cfg.lambda)
               : InputDistribution::uniform();
    const double bound = biased ? hybrid_total_bound(cfg.n, r, cfg.lambda) : 0.0;

    GameConfig game{params, challenge, cfg.trials, mix64(cfg.seed, 0x40)};

    std::vector<Distinguisher> zoo;
    zoo.push_back(weight_threshold_distinguisher(
        tuned_weight_threshold(params, challenge, cfg.training_samples, mix64(cfg.seed, 0x50))));
    zoo.push_back(frequency_scorer_distinguisher(params, challenge, cfg.training_samples,
                                                 mix64(cfg.seed, 0x60)));

    ExperimentResult result;
    result.rows.header = {"distinguisher", "n",        "m",
                          "r",             "lambda",   "trials",
                          "advantage",     "ci_halfwidth", "analytic_bound"};
    double max_advantage = 0.0;
    for (const auto& adversary : zoo) {
        const AdvantageReport report = run_game(game, adversary);
        max_advantage = std::max(max_advantage, report.empirical_advantage);
        result.rows.rows.push_back({report.distinguisher_name, std::to_string(cfg.n),
                                    std::to_string(m), std::to_string(r),
                                    biased ? format_double(cfg.lambda) : "inf",
                                    std::to_string(report.trials),
                                    format_double(report.empirical_advantage),
                                    format_double(report.confidence_halfwidth),
                                    format_double(bound)});
    }

    result.summary = {{"schema_version", kSchemaVersion},
                      {"command", "security-game"},
                      {"seed", cfg.seed},
                      {"trials", cfg.trials},
                      {"n", cfg.n},
                      {"m", m},
                      {"r", r},
                      {"challenge", cfg.challenge},
                      {"analytic_bound", bound},
                      {"max_advantage", max_advantage}};
    if (biased) result.summary["lambda"] = cfg.lambda;
    return result;
}

inline ExperimentResult run_command(const ExperimentConfig& cfg) {
    if (cfg.command == "search-bench") return cmd_search_bench(cfg);
    if (cfg.command == "embed-bench") return cmd_embed_bench(cfg);
    if (cfg.command == "security-game") return cmd_security_game(cfg);
    throw ConfigError("config: unknown command '" + cfg.command + "'");
}

// ---- round-trip audit: summary statistics must be recomputable from rows ----

namespace detail {

inline void check_close(double a, double b, const std::string& what) {
    const double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - b) > tol) {
        throw std::runtime_error("result audit: " + what + " mismatch (" + format_double(a) +
                                 " vs " + format_double(b) + ")");
    }
}

}  // namespace detail

// Recomputes the summary's derived statistics from the CSV rows and throws
// on any disagreement.
inline void verify_result(const ExperimentResult& result) {
    const auto& summary = result.summary;
    const std::string command = summary.at("command").get<std::string>();
    const auto& table = result.rows;

    if (command == "search-bench") {
        const auto col_n = table.column("n");
        const auto col_calls = table.column("oracle_calls");
        const auto col_failed = table.column("failed");
        for (const auto& entry : summary.at("per_n")) {
            const auto n = entry.at("n").get<std::uint64_t>();
            std::size_t trials = 0, failures = 0;
            double calls = 0.0;
            for (const auto& row : table.rows) {
                if (std::stoull(row[col_n]) != n) continue;
                ++trials;
                failures += row[col_failed] == "1" ? 1 : 0;
                calls += std::stod(row[col_calls]);
            }
            if (trials != entry.at("trials").get<std::size_t>() ||
                failures != entry.at("failures").get<std::size_t>()) {
                throw std::runtime_error("result audit: search-bench counts mismatch");
            }
            detail::check_close(static_cast<double>(failures) / static_cast<double>(trials),
                                entry.at("failure_rate").get<double>(), "failure_rate");
            detail::check_close(calls / static_cast<double>(trials),
                                entry.at("mean_oracle_calls").get<double>(), "mean_oracle_calls");
        }
    } else if (command == "embed-bench") {
        const auto col_d = table.column("true_d");
        const auto col_est = table.column("estimate");
        const auto col_abs = table.column("abs_err");
        const auto n = summary.at("n").get<double>();
        for (const auto& entry : summary.at("per_d")) {
            const auto d = entry.at("d").get<std::uint64_t>();
            std::size_t trials = 0;
            double sum_est = 0.0, sum_abs = 0.0;
            std::vector<std::size_t> exceed(entry.at("exceedance").size(), 0);
            for (const auto& row : table.rows) {
                if (std::stoull(row[col_d]) != d) continue;
                ++trials;
                sum_est += std::stod(row[col_est]);
                const double abs_err = std::stod(row[col_abs]);
                sum_abs += abs_err;
                std::size_t ei = 0;
                for (const auto& ex : entry.at("exceedance")) {
                    if (abs_err > ex.at("epsilon").get<double>() * n) ++exceed[ei];
                    ++ei;
                }
            }
            if (trials != entry.at("trials").get<std::size_t>()) {
                throw std::runtime_error("result audit: embed-bench trial count mismatch");
            }
            detail::check_close(sum_est / static_cast<double>(trials),
                                entry.at("mean_estimate").get<double>(), "mean_estimate");
            detail::check_close(sum_abs / static_cast<double>(trials),
                                entry.at("mean_abs_err").get<double>(), "mean_abs_err");
            std::size_t ei = 0;
            for (const auto& ex : entry.at("exceedance")) {
                if (exceed[ei] != ex.at("count").get<std::size_t>()) {
                    throw std::runtime_error("result audit: exceedance count mismatch");
                }
                ++ei;
            }
        }
    } else if (command == "security-game") {
        const auto col_adv = table.column("advantage");
        double max_advantage = 0.0;
        for (const auto& row : table.rows) {
            max_advantage = std::max(max_advantage, std::stod(row[col_adv]));
        }
        detail::check_close(max_advantage, summary.at("max_advantage").get<double>(),
                            "max_advantage");
    } else {
        throw std::runtime_error("result audit: unknown command '" + command + "'");
    }
}

}  // namespace pph
