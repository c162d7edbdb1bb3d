#pragma once

#include "tale/sampling.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tale::verify {

struct Config {
    std::uint64_t seed = kDefaultSeed;
    int samples = 4096;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;  // numerical verdict
    nlohmann::json measured;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;

    bool within_time() const { return seconds <= limit_seconds; }
    bool ok() const { return passed && within_time(); }
};

inline constexpr int kCriteria = 13;

/// Runs one criterion (1..12). Exceptions become failed results.
CriterionResult run_criterion(int id, const Config& cfg);

/// Criteria 1..12 in order; `progress` sees each result as it completes.
std::vector<CriterionResult> run_criteria(const Config& cfg,
                                          const std::function<void(const CriterionResult&)>& progress = {});

/// Deterministic document (no timings) for the given results.
nlohmann::json results_json(const Config& cfg, const std::vector<CriterionResult>& results);

/// Criterion 13 from two independently produced output documents.
CriterionResult determinism_result(const std::string& first, const std::string& second, double seconds,
                                   double limit_seconds);

/// "[PASS]  5  ALE order of Eguchi-Hanson ... (0.4 s)".
std::string format_line(const CriterionResult& r);

}  // namespace tale::verify
