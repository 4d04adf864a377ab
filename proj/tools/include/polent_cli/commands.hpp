#pragma once

#include <iosfwd>

#include "polent/jointstate.hpp"
#include "polent/spectral.hpp"
#include "polent_cli/config.hpp"

namespace polent::cli {

/// Model JSA (band-pass filtered) or the imported grid.
JsaGrid make_jsa(const RunConfig& config);

/// Configured splitter, with the H/V edge split fitted when target_alpha is set.
SplitterResponse make_splitter(const RunConfig& config, const JsaGrid& jsa);

PostSelectedAmplitudes make_amplitudes(const RunConfig& config);

/// Model state at `tau`: D scaled and shifted by `degradation`, then the
/// uniform background of the config mixed in.
PolarizationDensityMatrix model_state(const RunConfig& config, const PostSelectedAmplitudes& amps,
                                      double tau, const DegradationModel& degradation);

// Subcommands. Files go to config.out_dir; `report` gets a short summary.
void run_jsa(const RunConfig& config, std::ostream& report);
void run_sweep(const RunConfig& config, std::ostream& report);
void run_tomo_simulate(const RunConfig& config, std::ostream& report);
void run_tomo_reconstruct(const RunConfig& config, std::ostream& report);
void run_metrics(const RunConfig& config, std::ostream& report);
void run_fit(const RunConfig& config, std::ostream& report);

}  // namespace polent::cli
