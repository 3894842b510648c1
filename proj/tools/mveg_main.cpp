#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mveg/config.hpp"
#include "mveg/errors.hpp"
#include "mveg/run.hpp"
#include "mveg/verify.hpp"
#include "mveg/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw mveg::ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measure-valued selection-mutation games on finite metric strategy spaces"};
    app.set_version_flag("--version", std::string(mveg::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* simulate = app.add_subcommand("simulate", "integrate one configured experiment");
    simulate->add_option("config", config_path, "experiment config (JSON)")->required();

    std::string flatnorm_path;
    bool use_oracle = false;
    CLI::App* flatnorm =
        app.add_subcommand("flatnorm", "flat (dual bounded-Lipschitz) norm of a discrete measure");
    flatnorm->add_option("input", flatnorm_path, "measure document (JSON), or - for stdin")
        ->required();
    flatnorm->add_flag("--oracle", use_oracle,
                       "recompute with the brute-force oracle (support of at most 3 points)");

    std::string suite = "all";
    std::uint64_t seed = 0;
    CLI::App* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--suite", suite,
                       "oracle | norms | bullet | positivity | semiflow | lipschitz | "
                       "dissipativity | masslaw | all");
    verify->add_option("--seed", seed, "seed for the randomized checks");

    std::string sweep_config;
    std::string axis;
    CLI::App* sweep = app.add_subcommand("sweep", "one run per value along a config axis");
    sweep->add_option("config", sweep_config, "experiment config template (JSON)")->required();
    sweep->add_option("--axis", axis, "dotted.path=v1,v2,... (numeric values)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            mveg::ExperimentConfig cfg = mveg::parse_config_file(config_path);
            mveg::run_simulate(cfg, std::cout);
            return kExitOk;
        }
        if (flatnorm->parsed()) {
            double value = mveg::run_flatnorm_text(read_input(flatnorm_path), use_oracle);
            std::printf("%.17g\n", value);
            return kExitOk;
        }
        if (verify->parsed()) {
            return mveg::run_verify(suite, seed, std::cout) ? kExitOk : kExitVerify;
        }
        if (sweep->parsed()) {
            mveg::run_sweep(read_input(sweep_config), axis, std::cout);
            return kExitOk;
        }
    } catch (const mveg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const mveg::DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const mveg::StepFailure& e) {
        std::cerr << "error: " << e.what() << " (t=" << e.t << ")\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
