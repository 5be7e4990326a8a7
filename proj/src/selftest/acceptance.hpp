#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace perfkit::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Runs the twelve acceptance criteria; every random instance is derived
// from `seed`.
std::vector<CriterionResult> run_all(std::uint64_t seed = kDefaultSeed);

// "PASS  3 note-align-interpolation  (0.01 s)  <detail>"
std::string format(const CriterionResult& result);

}  // namespace perfkit::acceptance
