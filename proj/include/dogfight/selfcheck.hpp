#pragma once

#include <string>
#include <vector>

namespace dogfight {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick invariant suite: finite-difference gradient checks of the three
/// training losses on a small network, trim flight, a head-on missile hit,
/// serial vs parallel kernels and file-format round trips.
std::vector<CheckResult> run_selfcheck();

}  // namespace dogfight
