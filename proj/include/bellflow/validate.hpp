// Machine-checkable invariant suite behind the `validate` subcommand: each
// check reports a measured value against its threshold.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bellflow::validate {

struct CheckResult {
    std::string name;
    bool pass;
    double value;      // measured
    double threshold;  // admissible bound on `value`
    std::string detail;
};

struct ValidateOptions {
    double tolerance_scale = 1.0;   // < 1 tightens every threshold
    bool inject_nu_sign_flip = false;  // test hook: corrupt the dW- channel
    std::uint64_t seed = 1;
    int workers = 0;
    int sme_trajectories = 300;
};

std::vector<CheckResult> run_all(const ValidateOptions& opt);

}  // namespace bellflow::validate
