#include "hyplan/monitor.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplan {

const char *to_string(Origin origin)
{
	switch (origin) {
	case Origin::GoalNegation: return "goal-negation";
	case Origin::ActiveProcessCondition: return "active-process-condition";
	case Origin::InactiveProcessConditionNegation: return "inactive-process-condition-negation";
	case Origin::GlobalConstraint: return "global-constraint";
	}
	return "?";
}

TermPtr indicator(const Atom &atom)
{
	return sub(atom.lhs, atom.rhs);
}

Sign sign_of(double value)
{
	if (value < 0.0)
		return Sign::Negative;
	if (value > 0.0)
		return Sign::Positive;
	return Sign::Zero;
}

Sign sign_of(const Atom &atom, const State &state)
{
	return sign_of(eval_term(*indicator(atom), state));
}

bool holds(Relation rel, Sign sign)
{
	switch (rel) {
	case Relation::Eq: return sign == Sign::Zero;
	case Relation::Lt: return sign == Sign::Negative;
	case Relation::Gt: return sign == Sign::Positive;
	case Relation::Le: return sign != Sign::Positive;
	case Relation::Ge: return sign != Sign::Negative;
	}
	return false;
}

namespace {

class Strengthener {
public:
	Strengthener(const Mode &mode, const State &start, std::vector<MonitoredAtom> &out)
	    : mode_(mode), start_(start), out_(out)
	{
	}

	void component(const Formula &f, Origin origin, int source)
	{
		origin_ = origin;
		source_ = source;
		visit(f, false);
	}

private:
	bool truth(const Formula &f, bool negated) const { return eval_formula(f, start_) != negated; }

	void visit(const Formula &f, bool negated)
	{
		if (const auto *b = std::get_if<BoolConstant>(&f.node)) {
			if (b->value == negated)
				throw StrengtheningVacuous(fmt::format("{} component is false in the start state", to_string(origin_)));
			return;
		}
		if (const auto *n = std::get_if<Negation>(&f.node)) {
			visit(*n->operand, !negated);
			return;
		}
		if (const auto *a = std::get_if<Atom>(&f.node)) {
			literal(*a, negated);
			return;
		}
		const auto *c = std::get_if<Conjunction>(&f.node);
		const auto &operands = c ? c->operands : std::get<Disjunction>(f.node).operands;
		bool conjunctive = (c != nullptr) != negated;
		if (conjunctive) {
			for (const auto &g : operands)
				visit(*g, negated);
			return;
		}
		// keep only the disjuncts that currently hold
		bool any = false;
		for (const auto &g : operands)
			if (truth(*g, negated)) {
				any = true;
				visit(*g, negated);
			}
		if (!any)
			throw StrengtheningVacuous(
			    fmt::format("{} disjunction has no disjunct true in the start state", to_string(origin_)));
	}

	void literal(const Atom &a, bool negated)
	{
		double d = eval_term(*a.lhs, start_) - eval_term(*a.rhs, start_);
		if (relation_holds(a.rel, d) == negated)
			throw StrengtheningVacuous(fmt::format("{} atom is false in the start state", to_string(origin_)));
		if (!mentions_affected(a))
			return;
		Atom m = a;
		if (negated)
			m.rel = a.rel == Relation::Eq ? (d < 0.0 ? Relation::Lt : Relation::Gt) : negate(a.rel);
		out_.push_back({m, indicator(m), origin_, source_});
	}

	bool mentions_affected(const Atom &a) const
	{
		std::vector<int> vars;
		collect_variables(*a.lhs, vars);
		collect_variables(*a.rhs, vars);
		return std::any_of(vars.begin(), vars.end(), [&](int v) { return mode_.affects(v); });
	}

	const Mode &mode_;
	const State &start_;
	std::vector<MonitoredAtom> &out_;
	Origin origin_ = Origin::GlobalConstraint;
	int source_ = -1;
};

} // namespace

Invariant build_invariant(const Task &task, const Mode &mode, const State &start, const InvariantOptions &options)
{
	Invariant inv;
	if (mode.empty())
		return inv;
	Strengthener s(mode, start, inv.atoms);
	if (options.include_goal)
		s.component(*negation(task.goal), Origin::GoalNegation, -1);
	std::size_t next_active = 0;
	for (std::size_t p = 0; p < task.processes.size(); ++p) {
		bool active = next_active < mode.active.size() && mode.active[next_active] == static_cast<int>(p);
		if (active) {
			++next_active;
			s.component(*task.processes[p].condition, Origin::ActiveProcessCondition, static_cast<int>(p));
		} else {
			s.component(*negation(task.processes[p].condition), Origin::InactiveProcessConditionNegation,
			            static_cast<int>(p));
		}
	}
	for (std::size_t c = 0; c < task.constraints.size(); ++c)
		s.component(*task.constraints[c], Origin::GlobalConstraint, static_cast<int>(c));
	return inv;
}

MonitorSettings monitor_settings(const SimConfig &config, Integrator integrator)
{
	return {integrator_settings(config, integrator), config.delta_z, config.delta_h_factor};
}

CrossingReport detect_crossing(const Invariant &invariant, const State &start, const Mode &mode, double duration,
                               const MonitorSettings &settings, const GridObserver &observer)
{
	CrossingReport report;
	const std::size_t natoms = invariant.atoms.size();
	report.min_margin.assign(natoms, std::numeric_limits<double>::infinity());
	if (observer)
		observer(start);

	if (invariant.empty()) {
		auto trace = integrate_interval(start, mode, duration, settings.delta_z, settings.integrator);
		if (observer)
			for (const auto &s : trace)
				observer(s);
		report.truncated_state = trace.empty() ? start : trace.back();
		report.truncation_time = report.truncated_state.clock;
		return report;
	}

	std::vector<double> values(natoms);
	auto evaluate = [&](const State &s, long step_index) {
		try {
			for (std::size_t i = 0; i < natoms; ++i)
				values[i] = eval_term(*invariant.atoms[i].indicator, s);
		} catch (const EvaluationError &e) {
			throw IntegrationFailure(static_cast<int>(step_index), fmt::format("monitoring failed: {}", e.what()));
		}
	};
	auto update_margins = [&] {
		for (std::size_t i = 0; i < natoms; ++i)
			report.min_margin[i] = std::min(report.min_margin[i], std::abs(values[i]));
	};

	evaluate(start, 0);
	update_margins();

	const double h = settings.delta_h();
	const StepSchedule schedule = decompose(duration, h);
	const double t0 = start.clock;
	State current = start;
	Stepper stepper(settings.integrator, mode);
	for (long i = 0; i < schedule.count(); ++i) {
		double dt = i < schedule.full_steps ? schedule.step : schedule.remainder;
		State next;
		try {
			next = stepper.advance(current, dt);
		} catch (const IntegrationFailure &e) {
			throw IntegrationFailure(static_cast<int>(i), e.what());
		} catch (const EvaluationError &e) {
			throw IntegrationFailure(static_cast<int>(i), fmt::format("step {}: {}", i, e.what()));
		}
		next.clock = i + 1 == schedule.count() ? t0 + duration : t0 + schedule.offset(i + 1, duration);
		evaluate(next, i);
		for (std::size_t a = 0; a < natoms; ++a)
			if (!relation_holds(invariant.atoms[a].atom.rel, values[a]))
				report.falsified.push_back(static_cast<int>(a));
		if (!report.falsified.empty()) {
			report.crossed = true;
			report.atom = report.falsified.front();
			for (int a : report.falsified)
				if (invariant.atoms[static_cast<std::size_t>(a)].origin == Origin::GlobalConstraint) {
					report.atom = a;
					break;
				}
			report.origin = invariant.atoms[static_cast<std::size_t>(report.atom)].origin;
			report.truncation_time = current.clock;
			report.truncated_state = std::move(current);
			report.crossing_time = next.clock;
			report.crossing_state = std::move(next);
			return report;
		}
		update_margins();
		if (observer)
			observer(next);
		current = std::move(next);
	}
	report.truncation_time = current.clock;
	report.truncated_state = std::move(current);
	return report;
}

CrossingReport detect_crossing(const Task &task, const Invariant &invariant, const State &start, const Mode &mode,
                               double duration, Integrator integrator)
{
	return detect_crossing(invariant, start, mode, duration, monitor_settings(task.config, integrator));
}

} // namespace hyplan
