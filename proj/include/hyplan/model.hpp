#pragma once

#include "hyplan/expr.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyplan {

enum class ValueKind { Real, Integer, Object };

struct ValueType {
	ValueKind kind = ValueKind::Real;
	int object_type = -1; ///< index into Task::types when kind == Object

	bool numeric() const { return kind != ValueKind::Object; }
	friend bool operator==(const ValueType &, const ValueType &) = default;
};

struct ObjectType {
	std::string name;
	int parent = -1;
	std::vector<int> objects; ///< ids of every object of this type or a subtype
};

struct Object {
	std::string name;
	int type;
	bool is_constant = false; ///< declared by the domain rather than the problem
};

struct FluentDecl {
	std::string name;
	std::vector<int> argument_types;
	ValueType value_type;
};

/// A ground fluent f(α).
struct StateVariable {
	int fluent;
	std::vector<int> args;
	std::string name; ///< "(f a b)"
	ValueType type;
};

struct Assignment {
	int target;
	TermPtr rhs;
};

struct Action {
	std::string name; ///< ground name, "move car1"
	FormulaPtr precondition;
	std::vector<Assignment> effects;
};

/// ḟ(α) = rate
struct RateEffect {
	int target;
	TermPtr rate;
};

struct Process {
	std::string name;
	FormulaPtr condition;
	std::vector<RateEffect> effects;
};

struct SimConfig {
	double delta_max = 1.0;
	double delta_min = 0.0;
	double delta_z = 0.1;
	double delta_h_factor = 0.1;
	double fixpoint_epsilon = 1e-6;
	int max_fixpoint_iters = 100;

	double delta_h() const { return delta_h_factor * delta_z; }
	/// Throws ModelError when the bounds are inconsistent.
	void check() const;
};

struct Task {
	std::string domain_name;
	std::string problem_name;
	std::vector<ObjectType> types;
	std::vector<Object> objects;
	std::vector<FluentDecl> fluents;
	std::vector<StateVariable> variables;
	State initial;
	std::vector<Action> actions;
	std::vector<Process> processes;
	FormulaPtr goal;
	std::vector<FormulaPtr> constraints; ///< CNF clauses
	SimConfig config;
	bool declared_delta_max = false; ///< :bounds named :delta-max explicitly

	std::vector<std::string> variable_names() const;
	std::optional<int> find_variable(std::string_view ground_name) const;
	std::optional<int> find_action(std::string_view ground_name) const;
	std::optional<int> find_object(std::string_view name) const;
	bool has_real_variables() const;
	std::string describe(const Formula &f) const;
	std::string describe(const Term &t) const;
};

/// Checks structural invariants: state totality, effect targets and types,
/// unique targets per action, config bounds, and that the initial state
/// satisfies every constraint clause. Throws ModelError.
void validate_task(const Task &task);

/// Index of the first clause false in `state`, or -1 when all hold.
int first_violated_clause(const Task &task, const State &state);

/// s_a: every rhs evaluated in the old state, then assigned; clock unchanged.
/// Throws NotApplicable (precondition false or evaluation failure) or
/// ConstraintViolation.
State apply_action(const Task &task, const State &state, const Action &action);

/// Non-throwing variant used on the search hot path.
std::optional<State> try_apply_action(const Task &task, const State &state, const Action &action);

/// s[act]; NotApplicable carries the index of the first failing action.
State apply_sequence(const Task &task, const State &state, std::span<const int> action_ids);

/// Canonical ground name: "(f a b)" for fluent f with object args a b.
std::string ground_name(std::string_view head, std::span<const std::string> args);

} // namespace hyplan
