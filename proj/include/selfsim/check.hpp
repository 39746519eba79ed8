#pragma once

#include <string>
#include <vector>

namespace selfsim {

/// One named pass/fail verdict. `observed` is the measured quantity (usually
/// an error magnitude), `bound` what it was held against; `detail` carries
/// the numbers a reader needs to judge a failure at a glance.
struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    std::string detail;
};

inline bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

} // namespace selfsim
