#pragma once

#include "hyplan/dynamics.hpp"
#include "hyplan/model.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hyplan {

/// Which part of the interval invariant an atom was taken from.
enum class Origin {
	GoalNegation,
	ActiveProcessCondition,
	InactiveProcessConditionNegation,
	GlobalConstraint,
};

const char *to_string(Origin origin);

struct MonitoredAtom {
	Atom atom;
	TermPtr indicator; ///< lhs - rhs
	Origin origin;
	int source = -1; ///< process id or constraint clause index; -1 for the goal
};

/// Strengthened interval invariant, flattened to the atoms that must keep
/// their truth value while the mode is held fixed.
struct Invariant {
	std::vector<MonitoredAtom> atoms;

	bool empty() const { return atoms.empty(); }
};

struct InvariantOptions {
	/// Drop the goal-negation component (used once the goal already holds).
	bool include_goal = true;
};

/// Pushes each component to negation normal form, replaces every disjunction
/// by the conjunction of its disjuncts true in `start`, and keeps only atoms
/// mentioning a variable the mode changes. Throws StrengtheningVacuous when a
/// component is already false in `start`.
Invariant build_invariant(const Task &task, const Mode &mode, const State &start,
                          const InvariantOptions &options = {});

TermPtr indicator(const Atom &atom);

enum class Sign { Negative, Zero, Positive };

Sign sign_of(const Atom &atom, const State &state);
Sign sign_of(double value);
bool holds(Relation rel, Sign sign);

struct MonitorSettings {
	IntegratorSettings integrator;
	double delta_z = 0.1;
	double delta_h_factor = 0.1;

	double delta_h() const { return delta_z * delta_h_factor; }
};

MonitorSettings monitor_settings(const SimConfig &config, Integrator integrator);

struct CrossingReport {
	bool crossed = false;
	/// Clock of the last grid point where every monitored atom held.
	double truncation_time = 0.0;
	std::optional<Origin> origin;
	/// Index into Invariant::atoms of the reported falsified atom.
	int atom = -1;
	State truncated_state;

	/// First grid point where some atom failed, and every atom false there.
	double crossing_time = 0.0;
	State crossing_state;
	std::vector<int> falsified;

	/// Smallest |lhs - rhs| seen per atom over the accepted grid points.
	std::vector<double> min_margin;

	/// True when any falsified atom comes from a global constraint.
	bool violates_constraint() const { return origin == Origin::GlobalConstraint; }
};

using GridObserver = std::function<void(const State &)>;

/// Integrates on the fine grid delta_h (with a remainder step) and evaluates
/// every monitored atom at each grid point, stopping at the first point where
/// one of them is false. An empty invariant is integrated on the delta_z grid
/// since nothing needs to be monitored. `observer` sees the start state and
/// every accepted grid point.
CrossingReport detect_crossing(const Invariant &invariant, const State &start, const Mode &mode, double duration,
                               const MonitorSettings &settings, const GridObserver &observer = {});

CrossingReport detect_crossing(const Task &task, const Invariant &invariant, const State &start, const Mode &mode,
                               double duration, Integrator integrator);

} // namespace hyplan
