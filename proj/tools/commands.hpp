#pragma once

#include <string>

#include "repaint/config.hpp"

namespace repaint::cli {

enum class AblationKind { ResampleVsSlowdown, JumpGrid, Sdedit };

// Each command reads a validated config, writes its artifacts under
// run.output_dir (or the explicit path given) and reports a short summary on
// stdout. Library errors propagate to the caller.
void run_train(const RunConfig& config);
void run_sample(const RunConfig& config);
void run_inpaint(const RunConfig& config);
void run_gen_mask(const RunConfig& config, const std::string& out_path);
void run_dump_schedule(const RunConfig& config, const std::string& out_path);
void run_ablate(const RunConfig& config, AblationKind kind);

}  // namespace repaint::cli
