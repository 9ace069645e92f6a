#include "hyplan/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hyplan {

void SimConfig::check() const
{
	if (!(delta_min >= 0.0 && delta_min <= delta_max))
		throw ModelError(fmt::format("need 0 <= delta-min <= delta-max (got {} and {})", delta_min, delta_max));
	if (!(delta_z > 0.0 && delta_z <= delta_max))
		throw ModelError(fmt::format("need 0 < delta-z <= delta-max (got {} and {})", delta_z, delta_max));
	if (!(delta_h_factor > 0.0 && delta_h_factor <= 1.0))
		throw ModelError(fmt::format("delta-h factor must lie in (0, 1], got {}", delta_h_factor));
	if (!(fixpoint_epsilon > 0.0))
		throw ModelError("fixpoint epsilon must be positive");
	if (max_fixpoint_iters < 1)
		throw ModelError("max fixpoint iterations must be at least 1");
}

std::vector<std::string> Task::variable_names() const
{
	std::vector<std::string> names;
	names.reserve(variables.size());
	for (const auto &v : variables)
		names.push_back(v.name);
	return names;
}

namespace {

std::string squash(std::string_view s)
{
	std::string out;
	bool space = false;
	for (char c : s) {
		if (std::isspace(static_cast<unsigned char>(c))) {
			space = !out.empty();
			continue;
		}
		if (space && out.back() != '(' && c != ')')
			out += ' ';
		space = false;
		out += c;
	}
	return out;
}

} // namespace

std::optional<int> Task::find_variable(std::string_view name) const
{
	std::string key = squash(name);
	for (std::size_t i = 0; i < variables.size(); ++i)
		if (variables[i].name == key)
			return static_cast<int>(i);
	return std::nullopt;
}

std::optional<int> Task::find_action(std::string_view name) const
{
	std::string key = squash(name);
	if (key.size() >= 2 && key.front() == '(' && key.back() == ')')
		key = squash(key.substr(1, key.size() - 2));
	for (std::size_t i = 0; i < actions.size(); ++i)
		if (actions[i].name == key)
			return static_cast<int>(i);
	return std::nullopt;
}

std::optional<int> Task::find_object(std::string_view name) const
{
	for (std::size_t i = 0; i < objects.size(); ++i)
		if (objects[i].name == name)
			return static_cast<int>(i);
	return std::nullopt;
}

bool Task::has_real_variables() const
{
	return std::any_of(variables.begin(), variables.end(),
	                   [](const StateVariable &v) { return v.type.kind == ValueKind::Real; });
}

std::string Task::describe(const Formula &f) const
{
	auto names = variable_names();
	return to_string(f, names);
}

std::string Task::describe(const Term &t) const
{
	auto names = variable_names();
	return to_string(t, names);
}

std::string ground_name(std::string_view head, std::span<const std::string> args)
{
	std::string s = fmt::format("({}", head);
	for (const auto &a : args)
		s += " " + a;
	return s + ")";
}

void validate_task(const Task &task)
{
	task.config.check();
	const auto nvars = static_cast<int>(task.variables.size());
	if (task.initial.size() != nvars)
		throw ModelError(fmt::format("initial state has {} values for {} state variables",
		                             task.initial.size(), nvars));
	if (task.initial.clock < 0.0)
		throw ModelError("initial clock must be non-negative");
	for (int v = 0; v < nvars; ++v) {
		double value = task.initial[v];
		const auto &type = task.variables[static_cast<std::size_t>(v)].type;
		if (!std::isfinite(value))
			throw ModelError(fmt::format("initial value of {} is not finite", task.variables[static_cast<std::size_t>(v)].name));
		if (type.kind == ValueKind::Integer && std::trunc(value) != value)
			throw ModelError(fmt::format("integer fluent {} has non-integral value {}",
			                             task.variables[static_cast<std::size_t>(v)].name, value));
	}
	for (const auto &a : task.actions) {
		std::vector<int> targets;
		for (const auto &e : a.effects) {
			if (e.target < 0 || e.target >= nvars)
				throw ModelError(fmt::format("action {} assigns an unknown variable", a.name));
			if (std::find(targets.begin(), targets.end(), e.target) != targets.end())
				throw ModelError(fmt::format("action {} has two effects on {}", a.name,
				                             task.variables[static_cast<std::size_t>(e.target)].name));
			targets.push_back(e.target);
		}
	}
	for (const auto &p : task.processes)
		for (const auto &e : p.effects) {
			if (e.target < 0 || e.target >= nvars)
				throw ModelError(fmt::format("process {} affects an unknown variable", p.name));
			if (task.variables[static_cast<std::size_t>(e.target)].type.kind != ValueKind::Real)
				throw ModelError(fmt::format("process {} affects {}, which is not real-valued", p.name,
				                             task.variables[static_cast<std::size_t>(e.target)].name));
		}
	if (!task.goal)
		throw ModelError("task has no goal");
	int clause = -1;
	try {
		clause = first_violated_clause(task, task.initial);
	} catch (const EvaluationError &e) {
		throw ModelError(fmt::format("constraints cannot be evaluated in the initial state: {}", e.what()));
	}
	if (clause >= 0)
		throw ModelError(fmt::format("initial state violates constraint {}",
		                             task.describe(*task.constraints[static_cast<std::size_t>(clause)])));
}

int first_violated_clause(const Task &task, const State &state)
{
	for (std::size_t i = 0; i < task.constraints.size(); ++i)
		if (!eval_formula(*task.constraints[i], state))
			return static_cast<int>(i);
	return -1;
}

namespace {

State assign_effects(const Task &task, const State &state, const Action &action)
{
	// rhs values first: effects are simultaneous
	std::vector<double> values;
	values.reserve(action.effects.size());
	for (const auto &e : action.effects)
		values.push_back(eval_term(*e.rhs, state));
	State next = state;
	for (std::size_t i = 0; i < action.effects.size(); ++i) {
		int target = action.effects[i].target;
		if (task.variables[static_cast<std::size_t>(target)].type.kind == ValueKind::Integer &&
		    std::trunc(values[i]) != values[i])
			throw EvaluationError(fmt::format("non-integral value {} assigned to {}", values[i],
			                                  task.variables[static_cast<std::size_t>(target)].name));
		next[target] = values[i];
	}
	return next;
}

} // namespace

State apply_action(const Task &task, const State &state, const Action &action)
{
	State next;
	try {
		if (!eval_formula(*action.precondition, state))
			throw NotApplicable(0, fmt::format("precondition of {} does not hold", action.name));
		next = assign_effects(task, state, action);
	} catch (const EvaluationError &e) {
		throw NotApplicable(0, fmt::format("{}: {}", action.name, e.what()));
	}
	int clause = -1;
	try {
		clause = first_violated_clause(task, next);
	} catch (const EvaluationError &e) {
		throw NotApplicable(0, fmt::format("{}: constraint evaluation failed: {}", action.name, e.what()));
	}
	if (clause >= 0)
		throw ConstraintViolation(clause, fmt::format("{} violates {}", action.name,
		                                              task.describe(*task.constraints[static_cast<std::size_t>(clause)])));
	return next;
}

std::optional<State> try_apply_action(const Task &task, const State &state, const Action &action)
{
	try {
		if (!eval_formula(*action.precondition, state))
			return std::nullopt;
		State next = assign_effects(task, state, action);
		if (first_violated_clause(task, next) >= 0)
			return std::nullopt;
		return next;
	} catch (const EvaluationError &) {
		return std::nullopt;
	}
}

State apply_sequence(const Task &task, const State &state, std::span<const int> action_ids)
{
	State current = state;
	for (std::size_t i = 0; i < action_ids.size(); ++i) {
		int id = action_ids[i];
		if (id < 0 || static_cast<std::size_t>(id) >= task.actions.size())
			throw NotApplicable(static_cast<int>(i), fmt::format("unknown action id {}", id));
		try {
			current = apply_action(task, current, task.actions[static_cast<std::size_t>(id)]);
		} catch (const NotApplicable &e) {
			throw NotApplicable(static_cast<int>(i), e.what());
		} catch (const ConstraintViolation &e) {
			throw NotApplicable(static_cast<int>(i), e.what());
		}
	}
	return current;
}

} // namespace hyplan
