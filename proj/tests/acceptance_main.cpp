// Acceptance battery: one line per criterion, nonzero exit if any fails.

#include "fixnet/acceptance.hpp"
#include "fixnet/numfmt.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  std::uint64_t seed = 0;
  if (const char* env = std::getenv("FIXNET_SEED"); env && *env) seed = fixnet::parse_size(env);
  const std::filesystem::path work =
      argc > 1 ? std::filesystem::path(argv[1])
               : std::filesystem::temp_directory_path() / "fixnet-acceptance";
  std::filesystem::create_directories(work);
  std::size_t failed = 0;
  fixnet::run_acceptance(seed, work, [&](const fixnet::CriterionResult& r) {
    std::cout << fixnet::format_criterion(r) << std::endl;
    if (r.status != "pass") ++failed;
  });
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
