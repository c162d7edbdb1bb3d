// Acceptance suite: one line per criterion, non-zero exit if any criterion fails.
#include "cli_io.hpp"
#include "verify.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <unistd.h>

#ifndef TALE_BINARY
#error "TALE_BINARY must point at the tale executable"
#endif

namespace fs = std::filesystem;
using namespace tale;

namespace {

std::string run_verify_all(const fs::path& out, std::uint64_t seed)
{
    char seed_hex[32];
    std::snprintf(seed_hex, sizeof seed_hex, "0x%llX", static_cast<unsigned long long>(seed));
    const std::string cmd = std::string("\"") + TALE_BINARY + "\" verify-all --no-rerun --seed " + seed_hex +
                            " --out \"" + out.string() + "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    (void)rc;  // the run is expected to report failed criteria through its exit code
    return fs::exists(out) ? cli::read_file(out.string()) : std::string();
}

}  // namespace

int main(int argc, char** argv)
{
    verify::Config cfg;
    bool skip_determinism = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) cfg.seed = cli::parse_seed(argv[++i]);
        else if (arg == "--samples" && i + 1 < argc) cfg.samples = std::atoi(argv[++i]);
        else if (arg == "--skip-determinism") skip_determinism = true;
    }

    int failed = 0;
    const auto report = [&](const verify::CriterionResult& r) {
        std::cout << verify::format_line(r) << std::endl;
        failed += !r.ok();
    };
    verify::run_criteria(cfg, report);

    if (!skip_determinism) {
        const fs::path dir = fs::temp_directory_path() / ("tale-acceptance-" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const auto t0 = std::chrono::steady_clock::now();
        const std::string first = run_verify_all(dir / "first.json", cfg.seed);
        const std::string second = run_verify_all(dir / "second.json", cfg.seed);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(verify::determinism_result(first, second, secs, 15 * 60));
        fs::remove_all(dir);
    }

    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
