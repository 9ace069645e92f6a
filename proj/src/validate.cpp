#include "hyplan/validate.hpp"

#include <fmt/format.h>

#include <cmath>

namespace hyplan {

namespace {

class Replay {
public:
	Replay(const Task &task, const ValidationSettings &settings, const GridObserver &observer)
	    : task_(task), observer_(observer)
	{
		monitor_.integrator = {settings.integrator, settings.epsilon, settings.max_iters};
		monitor_.delta_z = settings.delta_z;
		monitor_.delta_h_factor = settings.delta_h_factor;
		report_.settings = settings;
	}

	ValidationReport run(const Plan &plan)
	{
		State s = task_.initial;
		if (observer_)
			observer_(s);
		report_.makespan = plan.makespan;
		for (const auto &h : plan.happenings) {
			if (!wait(s, h.time))
				return finish(s);
			try {
				s = apply_sequence(task_, s, h.actions);
			} catch (const NotApplicable &e) {
				return fail(s, h.time, e.what());
			} catch (const ConstraintViolation &e) {
				report_.violation = Violation{h.time, task_.describe(*task_.constraints[static_cast<std::size_t>(
				                                              e.clause())]),
				                              Origin::GlobalConstraint, e.what()};
				report_.valid = false;
				return finish(s);
			}
			if (observer_)
				observer_(s);
		}
		if (!wait(s, plan.makespan))
			return finish(s);
		if (!holds_goal(s))
			return fail(s, s.clock, "goal does not hold at the end of the plan");
		return finish(s);
	}

private:
	bool holds_goal(const State &s) const
	{
		try {
			return eval_formula(*task_.goal, s);
		} catch (const EvaluationError &) {
			return false;
		}
	}

	ValidationReport fail(const State &s, double time, std::string cause)
	{
		report_.valid = false;
		report_.violation = Violation{time, {}, std::nullopt, std::move(cause)};
		return finish(s);
	}

	ValidationReport finish(const State &s)
	{
		report_.final_state = s;
		return std::move(report_);
	}

	/// Advances `s` to `until`; false once the plan is known to be invalid.
	bool wait(State &s, double until)
	{
		while (until - s.clock > 1e-9 * std::max(1.0, std::abs(until))) {
			IntervalSummary summary;
			summary.start = s.clock;
			try {
				Mode mode = compute_mode(task_, s);
				summary.mode = mode.active;
				InvariantOptions options;
				options.include_goal = !holds_goal(s);
				Invariant inv = build_invariant(task_, mode, s, options);
				CrossingReport r = detect_crossing(inv, s, mode, until - s.clock, monitor_, observer_);
				for (std::size_t a = 0; a < inv.atoms.size(); ++a) {
					const Atom &at = inv.atoms[a].atom;
					summary.margins.push_back(
					    {task_.describe(*atom(at.lhs, at.rel, at.rhs)), inv.atoms[a].origin, r.min_margin[a]});
				}
				if (!r.crossed) {
					s = std::move(r.truncated_state);
					s.clock = until;
				} else if (r.violates_constraint() && first_violated_clause(task_, r.crossing_state) >= 0) {
					summary.end = r.crossing_time;
					report_.intervals.push_back(std::move(summary));
					report_.valid = false;
					report_.violation = Violation{r.crossing_time, report_.intervals.back().margins[static_cast<std::size_t>(r.atom)].atom,
					                              r.origin, "global constraint crossed inside an interval"};
					s = std::move(r.crossing_state);
					return false;
				} else {
					summary.event = r.origin;
					s = std::move(r.crossing_state);
					if (observer_)
						observer_(s);
				}
			} catch (const Error &e) {
				summary.end = s.clock;
				report_.intervals.push_back(std::move(summary));
				report_.valid = false;
				report_.violation = Violation{s.clock, {}, std::nullopt, e.what()};
				return false;
			}
			summary.end = s.clock;
			report_.intervals.push_back(std::move(summary));
		}
		s.clock = std::max(s.clock, until);
		return true;
	}

	const Task &task_;
	const GridObserver &observer_;
	MonitorSettings monitor_;
	ValidationReport report_;
};

} // namespace

ValidationReport validate_plan(const Task &task, const Plan &plan, const ValidationSettings &settings,
                               const GridObserver &observer)
{
	return Replay(task, settings, observer).run(plan);
}

} // namespace hyplan
