// Command-line driver for reproducible experiments over the library:
// parameter generation, hashing and estimation from flat files, and the
// search / embedding / security benchmark suites. Every command is
// deterministic given its inputs; reruns produce byte-identical outputs.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pph/pph.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
};

void apply_overrides(pph::ExperimentConfig& cfg, const CliOverrides& overrides) {
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.trials) cfg.trials = *overrides.trials;
}

int run_bench(const std::string& command, const std::string& config_path,
              const std::string& out_path, const CliOverrides& overrides) {
    pph::ExperimentConfig cfg = pph::load_config(config_path);
    if (cfg.command != command) {
        throw pph::ConfigError("config: file is for command '" + cfg.command +
                               "', invoked as '" + command + "'");
    }
    apply_overrides(cfg, overrides);
    pph::validate_config(cfg);
    const pph::ExperimentResult result = pph::run_command(cfg);
    pph::save_result(out_path, result);
    std::cout << "wrote " << out_path << ".csv and " << out_path << ".json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hamming-distance estimation over property-preserving hashes"};
    app.require_subcommand(1);

    CliOverrides overrides;
    std::string config_path, out_path;

    // params
    auto* cmd_params = app.add_subcommand("params", "Generate public hash parameters");
    std::size_t p_n = 0;
    std::optional<std::size_t> p_m, p_r;
    std::uint64_t p_seed = 1;
    std::string p_out;
    cmd_params->add_option("--n", p_n, "Input length in bits")->required();
    cmd_params->add_option("--m", p_m, "Hash length in bits (default 4nr)");
    cmd_params->add_option("--r", p_r, "Insertions per input bit (default ceil(log2 n))");
    cmd_params->add_option("--seed", p_seed, "Deterministic seed");
    cmd_params->add_option("--out", p_out, "Output params JSON path")->required();

    // hash
    auto* cmd_hash = app.add_subcommand("hash", "Hash a file of input vectors");
    std::string h_params, h_in, h_out;
    cmd_hash->add_option("--params", h_params, "Params JSON path")->required();
    cmd_hash->add_option("--in", h_in, "Input vectors, one '<length>:<hex>' per line")->required();
    cmd_hash->add_option("--out", h_out, "Output hashes JSON path")->required();

    // estimate
    auto* cmd_estimate = app.add_subcommand("estimate", "Estimate distance between stored hashes");
    std::string e_params, e_hashes, e_out;
    std::size_t e_a = 0, e_b = 1;
    std::optional<std::size_t> e_s;
    std::uint64_t e_seed = 1;
    cmd_estimate->add_option("--params", e_params, "Params JSON path")->required();
    cmd_estimate->add_option("--hashes", e_hashes, "Hashes JSON path")->required();
    cmd_estimate->add_option("--a", e_a, "Index of the first hash");
    cmd_estimate->add_option("--b", e_b, "Index of the second hash");
    cmd_estimate->add_option("--s", e_s, "Subsample size (full estimator if omitted)");
    cmd_estimate->add_option("--seed", e_seed, "Subsampling seed");
    cmd_estimate->add_option("--out", e_out, "Output JSON path (stdout if omitted)");

    // calibrate
    auto* cmd_calibrate = app.add_subcommand("calibrate", "Replace alpha by a measured value");
    std::string c_params, c_out;
    std::size_t c_trials = 2000;
    std::uint64_t c_seed = 1;
    cmd_calibrate->add_option("--params", c_params, "Params JSON path")->required();
    cmd_calibrate->add_option("--trials", c_trials, "Calibration trials");
    cmd_calibrate->add_option("--seed", c_seed, "Calibration seed");
    cmd_calibrate->add_option("--out", c_out, "Output params JSON path")->required();

    // benches
    for (const auto* name : {"search-bench", "embed-bench", "security-game"}) {
        auto* bench = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
        bench->add_option("--config", config_path, "Experiment config JSON")->required();
        bench->add_option("--out", out_path, "Output base path (.csv and .json)")->required();
        bench->add_option("--seed", overrides.seed, "Override the config seed");
        bench->add_option("--trials", overrides.trials, "Override the config trial count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cmd_params->parsed()) {
            const std::size_t r = p_r ? *p_r : pph::recommended_r(p_n);
            const std::size_t m = p_m ? *p_m : pph::recommended_m(p_n, r);
            pph::save_params(p_out, pph::setup(p_n, m, r, p_seed));
            std::cout << "wrote " << p_out << "\n";
        } else if (cmd_hash->parsed()) {
            const pph::PublicParams params = pph::load_params(h_params);
            const std::vector<pph::BitVector> vectors = pph::load_vectors(h_in);
            std::vector<pph::HashOutput> hashes;
            hashes.reserve(vectors.size());
            for (const auto& v : vectors) hashes.push_back(pph::hash(params, v));
            pph::save_hashes(h_out, hashes);
            std::cout << "wrote " << h_out << " (" << hashes.size() << " hashes)\n";
        } else if (cmd_estimate->parsed()) {
            const pph::PublicParams params = pph::load_params(e_params);
            const std::vector<pph::HashOutput> hashes = pph::load_hashes(e_hashes);
            if (e_a >= hashes.size() || e_b >= hashes.size()) {
                throw pph::ConfigError("estimate: hash index out of range");
            }
            const double estimate =
                e_s ? pph::subsampled_estimate(params, hashes[e_a], hashes[e_b], *e_s, e_seed)
                    : pph::dist_estimate(params, hashes[e_a], hashes[e_b]);
            const nlohmann::json out = {
                {"schema_version", pph::kSchemaVersion},
                {"params_id", params.id()},
                {"a", e_a},
                {"b", e_b},
                {"raw_symmetric_difference",
                 pph::symmetric_difference_count(hashes[e_a], hashes[e_b])},
                {"alpha", params.alpha},
                {"alpha_source", pph::to_string(params.alpha_source)},
                {"estimate", estimate},
                {"rounded_estimate", pph::rounded_estimate(params, estimate)}};
            if (e_out.empty()) {
                std::cout << out.dump(2) << "\n";
            } else {
                pph::write_text_file(e_out, out.dump(2) + "\n");
                std::cout << "wrote " << e_out << "\n";
            }
        } else if (cmd_calibrate->parsed()) {
            pph::PublicParams params = pph::load_params(c_params);
            if (c_trials == 0) throw pph::ConfigError("calibrate: trials must be >= 1");
            const double alpha = pph::calibrate_alpha(params, c_trials, c_seed);
            pph::save_params(c_out, pph::with_calibrated_alpha(params, alpha));
            std::cout << "wrote " << c_out << " (alpha " << pph::format_double(alpha) << ")\n";
        } else if (app.get_subcommand("search-bench")->parsed()) {
            return run_bench("search-bench", config_path, out_path, overrides);
        } else if (app.get_subcommand("embed-bench")->parsed()) {
            return run_bench("embed-bench", config_path, out_path, overrides);
        } else if (app.get_subcommand("security-game")->parsed()) {
            return run_bench("security-game", config_path, out_path, overrides);
        }
    } catch (const pph::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
