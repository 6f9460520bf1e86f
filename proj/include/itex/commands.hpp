#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "itex/config.hpp"
#include "itex/denoiser.hpp"
#include "itex/model_io.hpp"

namespace itex {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Reproducibility line printed by every command.
std::string provenance_line(const RunConfig& cfg);

/// Builds the sampling denoiser for a loaded model. Gaussian-field models
/// are resampled to the configured crop size when their grid differs.
std::unique_ptr<Denoiser> make_denoiser(const AnyModel& model, const RunConfig& cfg);

void cmd_fit(const std::string& reference_path, const std::string& out_model_path, const RunConfig& cfg,
             std::ostream& log);
void cmd_synthesize(const std::string& model_path, const std::string& out_image_path, const RunConfig& cfg,
                    std::ostream& log);
void cmd_quilt(const std::string& reference_path, const std::string& out_image_path, const RunConfig& cfg,
               std::ostream& log);
void cmd_evaluate(const std::string& output_path, const std::string& reference_path, const RunConfig& cfg,
                  bool json, std::ostream& out);

/// Full command line entry point; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace itex
