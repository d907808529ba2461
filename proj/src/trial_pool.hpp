#pragma once

#include "rotlasso/harness.hpp"

#include <functional>

namespace rotlasso {

using TrialFn =
    std::function<std::vector<ExperimentRow>(const GridPoint& point, const SeedSpec& seed)>;

/// Runs fn for every (grid point, trial) on spec.workers threads. Each job gets
/// the stream root.child(point).child(trial), so results do not depend on the
/// worker count. Rows come back sorted by (point, trial) with pass flags set.
std::vector<ExperimentRow> run_trials(const ExperimentSpec& spec, const TrialFn& fn);

}  // namespace rotlasso
