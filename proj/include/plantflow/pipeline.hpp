#pragma once

#include "plantflow/config.hpp"
#include "plantflow/errors.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace plantflow {

enum class Stage { Cell, Tensors, Macro, Verify };

std::string to_string(Stage s);
/// Comma-separated stage names, or "all". Throws ParseError.
std::vector<Stage> parse_stages(const std::string& list);

/// Process exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolve = 3;
constexpr int kExitVerify = 4;

/// Config errors map to 2, verification failures to 4, everything else to 3.
int exit_code_for(const Error& e);

struct StageResult {
    Stage stage = Stage::Cell;
    double seconds = 0.0;
    std::vector<std::string> artifacts;
};

struct PipelineSummary {
    std::vector<StageResult> stages;
    int exit_code = kExitOk;
    /// Set when a stage failed; the same record is written to error.json.
    std::string failed_stage, error_kind, error_message;
};

/// Runs the requested stages in the order cell, tensors, macro, verify,
/// writing artifacts into config.outputs.dir. A failing stage halts the run
/// and leaves error.json next to the artifacts. Progress lines go to `log`
/// when given.
PipelineSummary run_pipeline(const RunConfig& config, const std::vector<Stage>& stages, std::ostream* log = nullptr);

}  // namespace plantflow
