#pragma once

#include "hyplan/errors.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hyplan {

/* Ground terms and formulas.
 *
 * Terms are immutable trees shared through TermPtr. Every value is carried as
 * a double: reals and integers directly, object constants by their global
 * object id (exactly representable, compared by identity). */

enum class ArithOp { Add, Sub, Mul, Div, Pow, NthRoot };
enum class TrigOp { Sin, Cos, Tan };
enum class Relation { Eq, Lt, Gt, Le, Ge };

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

struct NumericConstant {
	double value;
};
struct ObjectConstant {
	int id;
	std::string name;
};
struct StateVariableRef {
	int variable;
};
/// Add and Mul are n-ary; Sub with a single operand is negation; Pow and
/// NthRoot take (base, exponent) and (radicand, degree).
struct Arithmetic {
	ArithOp op;
	std::vector<TermPtr> operands;
};
struct Trig {
	TrigOp op;
	TermPtr operand;
};

struct Term {
	std::variant<NumericConstant, ObjectConstant, StateVariableRef, Arithmetic, Trig> node;
};

struct Atom {
	TermPtr lhs;
	Relation rel;
	TermPtr rhs;
};
struct Negation {
	FormulaPtr operand;
};
struct Conjunction {
	std::vector<FormulaPtr> operands;
};
struct Disjunction {
	std::vector<FormulaPtr> operands;
};
struct BoolConstant {
	bool value;
};

struct Formula {
	std::variant<Atom, Negation, Conjunction, Disjunction, BoolConstant> node;
};

/// Total assignment of the task's state variables plus the clock t().
struct State {
	Eigen::VectorXd values;
	double clock = 0.0;

	double operator[](int variable) const { return values[variable]; }
	double &operator[](int variable) { return values[variable]; }
	int size() const { return static_cast<int>(values.size()); }
};

bool bitwise_equal(const State &a, const State &b);

// construction helpers
TermPtr constant(double value);
TermPtr object_constant(int id, std::string name);
TermPtr variable(int id);
TermPtr arithmetic(ArithOp op, std::vector<TermPtr> operands);
TermPtr add(TermPtr a, TermPtr b);
TermPtr sub(TermPtr a, TermPtr b);
TermPtr mul(TermPtr a, TermPtr b);
TermPtr div(TermPtr a, TermPtr b);
TermPtr pow(TermPtr base, TermPtr exponent);
TermPtr nthroot(TermPtr radicand, TermPtr degree);
TermPtr neg(TermPtr a);
TermPtr trig(TrigOp op, TermPtr operand);

FormulaPtr atom(TermPtr lhs, Relation rel, TermPtr rhs);
FormulaPtr negation(FormulaPtr f);
FormulaPtr conjunction(std::vector<FormulaPtr> fs);
FormulaPtr disjunction(std::vector<FormulaPtr> fs);
FormulaPtr truth(bool value);

double eval_term(const Term &term, const State &state);
bool eval_formula(const Formula &formula, const State &state);

/// Truth of `lhs rel rhs` given the value of lhs - rhs.
bool relation_holds(Relation rel, double difference);
Relation negate(Relation rel);
Relation mirror(Relation rel);

bool operator==(const Term &a, const Term &b);
bool operator==(const Formula &a, const Formula &b);
bool same_term(const TermPtr &a, const TermPtr &b);
bool same_formula(const FormulaPtr &a, const FormulaPtr &b);

/// Appends every state variable id mentioned by the term/formula.
void collect_variables(const Term &term, std::vector<int> &out);
void collect_variables(const Formula &formula, std::vector<int> &out);

const char *to_string(Relation rel);
const char *to_string(ArithOp op);
const char *to_string(TrigOp op);

/// S-expression rendering; `names[v]` is used for state variable v and
/// must already carry its parentheses, e.g. "(x)" or "(pos car1)".
std::string to_string(const Term &term, std::span<const std::string> names);
std::string to_string(const Formula &formula, std::span<const std::string> names);

} // namespace hyplan
