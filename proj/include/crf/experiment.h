#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace crf {

/// One acceptance check of an experiment run.
struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<CheckResult> checks;

    bool pass() const {
        for (const CheckResult& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

struct ExperimentOptions {
    nlohmann::json config = nlohmann::json::object();
    std::string out_dir = "out";
    int workers = 4;
    unsigned long long seed = 20260823ULL;
};

/// Known experiment names: hopf-collapse, inoue-sm, inoue-splus, inoue-sminus,
/// elliptic, mabuchi-torus, validate-ricci.
std::vector<std::string> experiment_names();

/// Run one experiment, writing its CSV artifacts and report.json into
/// opt.out_dir.  Throws ConfigError on invalid configuration.
ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& opt);

}  // namespace crf
