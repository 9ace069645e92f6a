#pragma once

#include "hyplan/dynamics.hpp"
#include "hyplan/heuristic.hpp"
#include "hyplan/monitor.hpp"
#include "hyplan/plan.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace hyplan {

enum class Algorithm { Bfs, Gbfs };

const char *to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct SearchOptions {
	Algorithm algorithm = Algorithm::Gbfs;
	Integrator integrator = Integrator::RK22Midpoint;
	/// Monitor the invariant on the fine grid and truncate waits at crossings.
	/// When off, a wait always runs delta_max and only its end state is checked.
	bool zero_crossing = true;
	/// Duplicate detection on values rounded to this quantum; off when unset.
	std::optional<double> quantize;
	long node_cap = 10'000'000;
	double time_cap_seconds = 1800.0;
	int max_consecutive_actions = 64;
};

/// Label of a waiting step.
struct SimLabel {
	double duration = 0.0;
	bool truncated = false;
	std::optional<Origin> origin;
	std::string atom;
	std::vector<int> mode;
};

/// An action id or a wait.
using Label = std::variant<int, SimLabel>;

struct SimOutcome {
	std::optional<State> successor; ///< unset when the wait is pruned
	SimLabel label;
	std::optional<CrossingReport> report;
	Invariant invariant;
};

/// The waiting action of the search space.
class Simulator {
public:
	Simulator(const Task &task, const SearchOptions &options);

	/// Waits up to `duration` from `state`. With crossing checks on, a wait
	/// that falsifies a monitored atom ends
	///  - at the first grid point past the event when that point satisfies
	///    every constraint clause (goal reached, mode switch, or a clause that
	///    traded one true disjunct for another), so the next interval starts
	///    from the new situation;
	///  - otherwise at the last grid point before it; if that is `state`
	///    itself the wait is pruned.
	/// Waiting in an empty mode is pruned. `observer` sees every grid point.
	SimOutcome sim(const State &state, double duration, const GridObserver &observer = {}) const;
	SimOutcome sim(const State &state) const { return sim(state, task_.config.delta_max); }

private:
	const Task &task_;
	SearchOptions options_;
};

struct SearchStats {
	long expansions = 0;
	long generations = 0;
	long evaluations = 0;
	long sims = 0;
	long sims_pruned = 0;
	long crossings = 0;
	long duplicates = 0;
	long dead_ends = 0;
	double initial_h = 0.0;
	int initial_distinct_actions = 0;
	double runtime_seconds = 0.0;
};

enum class SearchStatus { Solved, Unsolvable, NodeCapReached, TimeCapReached };

const char *to_string(SearchStatus status);

struct SearchResult {
	SearchStatus status = SearchStatus::Unsolvable;
	std::optional<Plan> plan;
	std::vector<Label> path; ///< labels from the initial state to the goal
	State goal_state;
	SearchStats stats;
};

SearchResult search(const Task &task, const SearchOptions &options);

/// Groups consecutive actions into happenings at the clock they were applied
/// at and turns waits into intervals. `clocks[i]` is the clock before
/// `path[i]` and clocks.back() the final one. Throws InternalInconsistency
/// when the timing does not line up.
Plan extract_plan(const std::vector<Label> &path, const std::vector<double> &clocks, double delta_max);

/// Re-executes a path with the planner's own semantics; every intermediate
/// state (grid points included) goes to `observer`. Throws
/// InternalInconsistency when a step no longer applies.
State replay_path(const Task &task, const SearchOptions &options, const std::vector<Label> &path,
                  const GridObserver &observer = {});

} // namespace hyplan
