#pragma once

#include "hyplan/interval.hpp"
#include "hyplan/model.hpp"

#include <limits>
#include <vector>

namespace hyplan {

/// Instantaneous relaxation of a task: the original actions followed by one
/// action per process that advances each affected variable by
/// delta_max * rate under the process condition.
struct CompiledTask {
	const Task *task = nullptr;
	std::vector<Action> actions;
	std::size_t original_actions = 0;
};

CompiledTask compile_processes(const Task &task, double delta_max);
inline CompiledTask compile_processes(const Task &task) { return compile_processes(task, task.config.delta_max); }

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

struct RpgOptions {
	int max_layers = 256;
	/// Keep every layer's box and newly applied actions.
	bool record_layers = false;
};

struct RpgResult {
	double h = kInfiniteDistance;       ///< first goal-satisfiable layer, or infinity
	int layers = 0;                     ///< layers built before stopping
	int distinct_actions = 0;           ///< actions applied at least once
	std::vector<IntervalBox> boxes;     ///< boxes[k] is layer k (record_layers only)
	std::vector<std::vector<int>> fresh; ///< fresh[k]: actions first applied in layer k
};

RpgResult run_interval_rpg(const CompiledTask &compiled, const State &state, const RpgOptions &options = {});

/// Number of layers until the goal is interval-satisfiable; infinity at a
/// fixpoint or past the layer limit. Global constraints are ignored.
double h_interval_rpg(const CompiledTask &compiled, const State &state);

} // namespace hyplan
