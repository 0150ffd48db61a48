#ifndef PASFORGE_TOOLS_COMMANDS_H_
#define PASFORGE_TOOLS_COMMANDS_H_

#include "run_config.h"

namespace pasforge::cli {

// Each returns the process exit status. Failures throw.
int CmdBuild(const RunConfig& config);
int CmdTrain(const RunConfig& config);
int CmdPredict(const RunConfig& config);
int CmdEvaluate(const RunConfig& config);
int CmdAblate(const RunConfig& config);
int CmdGenSynthetic(const RunConfig& config);
int CmdGradCheck(const RunConfig& config);

// The row layout of the full feature-representation experiment.
std::string DefaultAblationSpecs();

}  // namespace pasforge::cli

#endif  // PASFORGE_TOOLS_COMMANDS_H_
