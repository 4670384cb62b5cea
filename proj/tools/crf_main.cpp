#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "crf/errors.h"
#include "crf/experiment.h"

namespace {

void print_usage() {
    std::cout << "usage: crf <experiment> --config <path> [--out <dir>] "
                 "[--workers N] [--seed S]\n";
    std::cout << "experiments:";
    for (const std::string& name : crf::experiment_names()) {
        std::cout << " " << name;
    }
    std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chern-Ricci flow laboratory on model complex surfaces"};
    std::string experiment;
    std::string config_path;
    std::string out_dir;
    int workers = 4;
    unsigned long long seed = 20260823ULL;
    app.add_option("experiment", experiment, "experiment name")->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads");
    app.add_option("--seed", seed, "sampler seed");

    if (argc <= 1) {
        print_usage();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (app.exit(e) == 0) return 0;
        print_usage();
        return 2;
    }

    crf::ExperimentOptions opt;
    opt.workers = workers;
    opt.seed = seed;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config " << config_path << "\n";
            return 2;
        }
        try {
            in >> opt.config;
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: invalid config JSON: " << e.what() << "\n";
            return 2;
        }
    }

    // Output directory precedence: --out, then CRF_OUT, then config, then ./out.
    if (!out_dir.empty()) {
        opt.out_dir = out_dir;
    } else if (const char* env = std::getenv("CRF_OUT"); env && *env) {
        opt.out_dir = env;
    } else if (opt.config.contains("out_dir")) {
        opt.out_dir = opt.config.at("out_dir").get<std::string>();
    } else {
        opt.out_dir = "out";
    }

    try {
        const crf::ExperimentResult res = crf::run_experiment(experiment, opt);
        for (const crf::CheckResult& c : res.checks) {
            std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << res.experiment << "/"
                      << c.name << " value=" << c.value << " threshold=" << c.threshold;
            if (!c.note.empty()) std::cout << " (" << c.note << ")";
            std::cout << "\n";
        }
        return res.pass() ? 0 : 1;
    } catch (const crf::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        print_usage();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
