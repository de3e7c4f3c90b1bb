#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "smab/engine.hpp"
#include "smab/metrics.hpp"

namespace smab {

// One summary.csv row; sim cells and deviation cells share the schema, with
// the deviation-only columns left empty for plain runs.
struct SummaryRow {
    std::string kind;  // "sim" or "deviation"
    std::size_t config_index = 0;
    int replica = 0;
    std::uint64_t seed = 0;
    std::string mode;  // deviation mode, empty for sim rows
    const SimConfig* config = nullptr;
    const SimResult* result = nullptr;
    double conform_utility = 0.0;
    double deviate_utility = 0.0;
    double gap = 0.0;
    std::string error;
};

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string rounds_csv(const SimResult& result);
std::string decay_csv(const DisagreementTrace& trace);

std::string pull_histogram_svg(const SimResult& result);
std::string decay_svg(const DisagreementTrace& trace);

// Write via a temp file and rename, so readers never see partial output.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace smab
