#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "smab/config.hpp"

namespace smab {

struct RunOptions {
    std::optional<std::uint64_t> seed;        // --seed
    std::optional<long long> stride;          // --stride
    bool plot = false;
    bool strict = false;
    bool dump_topology = false;
    int jobs = 1;
    bool quiet = false;
};

// Executes a resolved run spec and writes summary.csv, audit.txt, manifest.txt
// (plus rounds.csv/decay.csv for plain runs, and the SVG plots with --plot)
// into out_dir. Returns the process exit code: 0 on success, 1 when --strict
// is set and the audit failed.
int run_spec(RunSpec spec, const std::filesystem::path& out_dir, const RunOptions& options);

}  // namespace smab
