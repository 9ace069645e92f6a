#pragma once

#include "hyplan/monitor.hpp"
#include "hyplan/plan.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hyplan {

struct ValidationSettings {
	Integrator integrator = Integrator::ImplicitEuler;
	double delta_z = 0.001;
	double delta_h_factor = 0.1;
	double epsilon = 1e-6;
	int max_iters = 100;
};

struct AtomMargin {
	std::string atom;
	Origin origin;
	double margin; ///< smallest |lhs - rhs| over the accepted grid points
};

struct IntervalSummary {
	double start = 0.0;
	double end = 0.0;
	std::vector<int> mode;
	/// Set when a crossing split the wait here.
	std::optional<Origin> event;
	std::vector<AtomMargin> margins;
};

struct Violation {
	double time = 0.0;
	std::string atom;             ///< empty when no monitored atom is involved
	std::optional<Origin> origin;
	std::string cause;
};

struct ValidationReport {
	bool valid = true;
	double makespan = 0.0;
	ValidationSettings settings;
	std::vector<IntervalSummary> intervals;
	std::optional<Violation> violation;
	State final_state;
};

/// Replays `plan` from the initial state: each happening's actions in order,
/// and between happenings the current mode integrated with the fine settings
/// while the interval invariant is monitored. A crossing starts a new
/// interval at the crossing point unless that point violates a constraint
/// clause; such a violation, an inapplicable action, an integration failure
/// or a final state outside the goal makes the plan invalid.
ValidationReport validate_plan(const Task &task, const Plan &plan, const ValidationSettings &settings = {},
                               const GridObserver &observer = {});

} // namespace hyplan
