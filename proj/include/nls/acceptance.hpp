#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace nls {

/// Outcome of one acceptance criterion.
struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    /// Measured quantities against their tolerances.
    std::string detail;
    double seconds = 0.0;
};

struct SuiteOptions {
    /// Scratch directory for runs that write files.
    std::filesystem::path work_dir = std::filesystem::temp_directory_path() / "nls_lab_verify";
    /// Mutation fixture: scales the kinetic term of the energy functional
    /// by 1.01 everywhere the suite evaluates energies. A correct suite must
    /// fail under it.
    bool mutate_energy = false;
    /// Restrict the suite to these criterion ids; empty runs all of them.
    std::vector<std::string> only;
    /// Called after each criterion finishes.
    std::function<void(const CriterionResult&)> on_result;
};

/// Criterion ids of a suite. "fast" runs the classification, ground-state,
/// determinism criteria and the short conservation/virial smoke run; "full"
/// adds the long evolutions. Throws ConfigError for other names.
std::vector<std::string> suite_criteria(const std::string& suite);

std::vector<CriterionResult> run_suite(const std::string& suite, const SuiteOptions& options = {});

/// "PASS 3 ground-state identities: ..." style line.
std::string format_result(const CriterionResult& r);

nlohmann::json to_json(const std::vector<CriterionResult>& results);

} // namespace nls
