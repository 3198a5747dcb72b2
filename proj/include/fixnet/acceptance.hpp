#pragma once

// The acceptance battery: one self-contained check per criterion, each
// producing a pass/fail/skip line with the measured quantities.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace fixnet {

struct CriterionResult {
  std::string id;      // "AC-1" ... "AC-10"
  std::string title;
  std::string status;  // "pass", "fail" or "skip"
  std::string detail;
  double seconds = 0.0;
};

std::vector<std::string> acceptance_ids();

/// Runs one criterion. `workdir` receives the files AC-10 writes.
CriterionResult run_criterion(const std::string& id, std::uint64_t seed,
                              const std::filesystem::path& workdir);

/// Runs all criteria in order, reporting each as soon as it finishes.
std::vector<CriterionResult> run_acceptance(
    std::uint64_t seed, const std::filesystem::path& workdir,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "AC-3  PASS  title: detail  (1.2 s)".
std::string format_criterion(const CriterionResult& r);

}  // namespace fixnet
