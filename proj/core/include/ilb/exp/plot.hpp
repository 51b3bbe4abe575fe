#pragma once

#include <filesystem>
#include <string>

#include "ilb/eval/metrics.hpp"

namespace ilb {

// Two side-by-side line charts (simple and cumulative regret) with +-1 standard-error
// bands, one colour per algorithm. Output is a deterministic function of the summary.
std::string render_regret_svg(const RegretSummary& summary, const std::string& title);
void write_regret_svg(const std::filesystem::path& path, const RegretSummary& summary, const std::string& title);

}  // namespace ilb
