#pragma once

#include <CLI11.hpp>

namespace segbias::cli {

void register_audit(CLI::App& app);
void register_manipulate(CLI::App& app);
void register_eval(CLI::App& app);
void register_baseline(CLI::App& app);
void register_synth(CLI::App& app);

}  // namespace segbias::cli
