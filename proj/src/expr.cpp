#include "hyplan/expr.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstring>

namespace hyplan {

namespace {

template <class... Ts>
struct overloaded : Ts... {
	using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double checked(double v, const char *what)
{
	if (!std::isfinite(v))
		throw EvaluationError(fmt::format("non-finite result in {}", what));
	return v;
}

bool is_integral(double v) { return std::isfinite(v) && std::trunc(v) == v; }

double eval_pow(double base, double exponent)
{
	if (base < 0 && !is_integral(exponent))
		throw EvaluationError("negative base raised to a non-integer power");
	if (base == 0 && exponent < 0)
		throw EvaluationError("zero raised to a negative power");
	return checked(std::pow(base, exponent), "pow");
}

double eval_nthroot(double radicand, double degree)
{
	if (!is_integral(degree) || degree < 1)
		throw EvaluationError("root degree must be a positive integer");
	if (radicand < 0) {
		if (std::fmod(degree, 2.0) == 0.0)
			throw EvaluationError("even root of a negative number");
		return checked(-std::pow(-radicand, 1.0 / degree), "nthroot");
	}
	if (degree == 2.0)
		return std::sqrt(radicand);
	if (degree == 3.0)
		return std::cbrt(radicand);
	return checked(std::pow(radicand, 1.0 / degree), "nthroot");
}

double eval_arith(const Arithmetic &a, const State &s)
{
	const auto &ops = a.operands;
	switch (a.op) {
	case ArithOp::Add: {
		double r = eval_term(*ops[0], s);
		for (std::size_t i = 1; i < ops.size(); ++i)
			r += eval_term(*ops[i], s);
		return checked(r, "+");
	}
	case ArithOp::Sub: {
		double r = eval_term(*ops[0], s);
		if (ops.size() == 1)
			return -r;
		for (std::size_t i = 1; i < ops.size(); ++i)
			r -= eval_term(*ops[i], s);
		return checked(r, "-");
	}
	case ArithOp::Mul: {
		double r = eval_term(*ops[0], s);
		for (std::size_t i = 1; i < ops.size(); ++i)
			r *= eval_term(*ops[i], s);
		return checked(r, "*");
	}
	case ArithOp::Div: {
		double n = eval_term(*ops[0], s);
		double d = eval_term(*ops[1], s);
		if (d == 0.0)
			throw EvaluationError("division by zero");
		return checked(n / d, "/");
	}
	case ArithOp::Pow:
		return eval_pow(eval_term(*ops[0], s), eval_term(*ops[1], s));
	case ArithOp::NthRoot:
		return eval_nthroot(eval_term(*ops[0], s), eval_term(*ops[1], s));
	}
	throw EvaluationError("unknown arithmetic operator");
}

double eval_trig(const Trig &t, const State &s)
{
	double x = eval_term(*t.operand, s);
	switch (t.op) {
	case TrigOp::Sin: return checked(std::sin(x), "sin");
	case TrigOp::Cos: return checked(std::cos(x), "cos");
	case TrigOp::Tan: return checked(std::tan(x), "tan");
	}
	throw EvaluationError("unknown trigonometric function");
}

bool same_operands(const std::vector<TermPtr> &a, const std::vector<TermPtr> &b)
{
	if (a.size() != b.size())
		return false;
	for (std::size_t i = 0; i < a.size(); ++i)
		if (!same_term(a[i], b[i]))
			return false;
	return true;
}

bool same_operands(const std::vector<FormulaPtr> &a, const std::vector<FormulaPtr> &b)
{
	if (a.size() != b.size())
		return false;
	for (std::size_t i = 0; i < a.size(); ++i)
		if (!same_formula(a[i], b[i]))
			return false;
	return true;
}

std::string format_number(double v)
{
	return fmt::format("{}", v);
}

} // namespace

bool bitwise_equal(const State &a, const State &b)
{
	if (a.values.size() != b.values.size())
		return false;
	if (std::memcmp(&a.clock, &b.clock, sizeof(double)) != 0)
		return false;
	return a.values.size() == 0 ||
	       std::memcmp(a.values.data(), b.values.data(),
	                   sizeof(double) * static_cast<std::size_t>(a.values.size())) == 0;
}

TermPtr constant(double value)
{
	return std::make_shared<const Term>(Term{NumericConstant{value}});
}

TermPtr object_constant(int id, std::string name)
{
	return std::make_shared<const Term>(Term{ObjectConstant{id, std::move(name)}});
}

TermPtr variable(int id)
{
	return std::make_shared<const Term>(Term{StateVariableRef{id}});
}

TermPtr arithmetic(ArithOp op, std::vector<TermPtr> operands)
{
	return std::make_shared<const Term>(Term{Arithmetic{op, std::move(operands)}});
}

TermPtr add(TermPtr a, TermPtr b) { return arithmetic(ArithOp::Add, {std::move(a), std::move(b)}); }
TermPtr sub(TermPtr a, TermPtr b) { return arithmetic(ArithOp::Sub, {std::move(a), std::move(b)}); }
TermPtr mul(TermPtr a, TermPtr b) { return arithmetic(ArithOp::Mul, {std::move(a), std::move(b)}); }
TermPtr div(TermPtr a, TermPtr b) { return arithmetic(ArithOp::Div, {std::move(a), std::move(b)}); }
TermPtr pow(TermPtr a, TermPtr b) { return arithmetic(ArithOp::Pow, {std::move(a), std::move(b)}); }
TermPtr nthroot(TermPtr a, TermPtr b) { return arithmetic(ArithOp::NthRoot, {std::move(a), std::move(b)}); }
TermPtr neg(TermPtr a) { return arithmetic(ArithOp::Sub, {std::move(a)}); }

TermPtr trig(TrigOp op, TermPtr operand)
{
	return std::make_shared<const Term>(Term{Trig{op, std::move(operand)}});
}

FormulaPtr atom(TermPtr lhs, Relation rel, TermPtr rhs)
{
	return std::make_shared<const Formula>(Formula{Atom{std::move(lhs), rel, std::move(rhs)}});
}

FormulaPtr negation(FormulaPtr f)
{
	return std::make_shared<const Formula>(Formula{Negation{std::move(f)}});
}

FormulaPtr conjunction(std::vector<FormulaPtr> fs)
{
	return std::make_shared<const Formula>(Formula{Conjunction{std::move(fs)}});
}

FormulaPtr disjunction(std::vector<FormulaPtr> fs)
{
	return std::make_shared<const Formula>(Formula{Disjunction{std::move(fs)}});
}

FormulaPtr truth(bool value)
{
	return std::make_shared<const Formula>(Formula{BoolConstant{value}});
}

double eval_term(const Term &term, const State &state)
{
	return std::visit(overloaded{
	    [](const NumericConstant &c) { return c.value; },
	    [](const ObjectConstant &c) { return static_cast<double>(c.id); },
	    [&](const StateVariableRef &v) { return state[v.variable]; },
	    [&](const Arithmetic &a) { return eval_arith(a, state); },
	    [&](const Trig &t) { return eval_trig(t, state); },
	}, term.node);
}

bool relation_holds(Relation rel, double d)
{
	switch (rel) {
	case Relation::Eq: return d == 0.0;
	case Relation::Lt: return d < 0.0;
	case Relation::Gt: return d > 0.0;
	case Relation::Le: return d <= 0.0;
	case Relation::Ge: return d >= 0.0;
	}
	return false;
}

Relation negate(Relation rel)
{
	switch (rel) {
	case Relation::Lt: return Relation::Ge;
	case Relation::Gt: return Relation::Le;
	case Relation::Le: return Relation::Gt;
	case Relation::Ge: return Relation::Lt;
	case Relation::Eq: break;
	}
	throw std::logic_error("equality has no single-relation negation");
}

Relation mirror(Relation rel)
{
	switch (rel) {
	case Relation::Lt: return Relation::Gt;
	case Relation::Gt: return Relation::Lt;
	case Relation::Le: return Relation::Ge;
	case Relation::Ge: return Relation::Le;
	case Relation::Eq: return Relation::Eq;
	}
	return rel;
}

bool eval_formula(const Formula &formula, const State &state)
{
	return std::visit(overloaded{
	    [&](const Atom &a) {
		    double l = eval_term(*a.lhs, state);
		    double r = eval_term(*a.rhs, state);
		    switch (a.rel) {
		    case Relation::Eq: return l == r;
		    case Relation::Lt: return l < r;
		    case Relation::Gt: return l > r;
		    case Relation::Le: return l <= r;
		    case Relation::Ge: return l >= r;
		    }
		    return false;
	    },
	    [&](const Negation &n) { return !eval_formula(*n.operand, state); },
	    [&](const Conjunction &c) {
		    for (const auto &f : c.operands)
			    if (!eval_formula(*f, state))
				    return false;
		    return true;
	    },
	    [&](const Disjunction &d) {
		    for (const auto &f : d.operands)
			    if (eval_formula(*f, state))
				    return true;
		    return false;
	    },
	    [](const BoolConstant &b) { return b.value; },
	}, formula.node);
}

bool same_term(const TermPtr &a, const TermPtr &b)
{
	if (a == b)
		return true;
	if (!a || !b)
		return false;
	return *a == *b;
}

bool same_formula(const FormulaPtr &a, const FormulaPtr &b)
{
	if (a == b)
		return true;
	if (!a || !b)
		return false;
	return *a == *b;
}

bool operator==(const Term &a, const Term &b)
{
	if (a.node.index() != b.node.index())
		return false;
	return std::visit(overloaded{
	    [&](const NumericConstant &x) { return x.value == std::get<NumericConstant>(b.node).value; },
	    [&](const ObjectConstant &x) { return x.id == std::get<ObjectConstant>(b.node).id; },
	    [&](const StateVariableRef &x) { return x.variable == std::get<StateVariableRef>(b.node).variable; },
	    [&](const Arithmetic &x) {
		    const auto &y = std::get<Arithmetic>(b.node);
		    return x.op == y.op && same_operands(x.operands, y.operands);
	    },
	    [&](const Trig &x) {
		    const auto &y = std::get<Trig>(b.node);
		    return x.op == y.op && same_term(x.operand, y.operand);
	    },
	}, a.node);
}

bool operator==(const Formula &a, const Formula &b)
{
	if (a.node.index() != b.node.index())
		return false;
	return std::visit(overloaded{
	    [&](const Atom &x) {
		    const auto &y = std::get<Atom>(b.node);
		    return x.rel == y.rel && same_term(x.lhs, y.lhs) && same_term(x.rhs, y.rhs);
	    },
	    [&](const Negation &x) { return same_formula(x.operand, std::get<Negation>(b.node).operand); },
	    [&](const Conjunction &x) { return same_operands(x.operands, std::get<Conjunction>(b.node).operands); },
	    [&](const Disjunction &x) { return same_operands(x.operands, std::get<Disjunction>(b.node).operands); },
	    [&](const BoolConstant &x) { return x.value == std::get<BoolConstant>(b.node).value; },
	}, a.node);
}

void collect_variables(const Term &term, std::vector<int> &out)
{
	std::visit(overloaded{
	    [](const NumericConstant &) {},
	    [](const ObjectConstant &) {},
	    [&](const StateVariableRef &v) { out.push_back(v.variable); },
	    [&](const Arithmetic &a) {
		    for (const auto &op : a.operands)
			    collect_variables(*op, out);
	    },
	    [&](const Trig &t) { collect_variables(*t.operand, out); },
	}, term.node);
}

void collect_variables(const Formula &formula, std::vector<int> &out)
{
	std::visit(overloaded{
	    [&](const Atom &a) {
		    collect_variables(*a.lhs, out);
		    collect_variables(*a.rhs, out);
	    },
	    [&](const Negation &n) { collect_variables(*n.operand, out); },
	    [&](const Conjunction &c) {
		    for (const auto &f : c.operands)
			    collect_variables(*f, out);
	    },
	    [&](const Disjunction &d) {
		    for (const auto &f : d.operands)
			    collect_variables(*f, out);
	    },
	    [](const BoolConstant &) {},
	}, formula.node);
}

const char *to_string(Relation rel)
{
	switch (rel) {
	case Relation::Eq: return "=";
	case Relation::Lt: return "<";
	case Relation::Gt: return ">";
	case Relation::Le: return "<=";
	case Relation::Ge: return ">=";
	}
	return "?";
}

const char *to_string(ArithOp op)
{
	switch (op) {
	case ArithOp::Add: return "+";
	case ArithOp::Sub: return "-";
	case ArithOp::Mul: return "*";
	case ArithOp::Div: return "/";
	case ArithOp::Pow: return "^";
	case ArithOp::NthRoot: return "nthroot";
	}
	return "?";
}

const char *to_string(TrigOp op)
{
	switch (op) {
	case TrigOp::Sin: return "sin";
	case TrigOp::Cos: return "cos";
	case TrigOp::Tan: return "tan";
	}
	return "?";
}

std::string to_string(const Term &term, std::span<const std::string> names)
{
	return std::visit(overloaded{
	    [](const NumericConstant &c) { return format_number(c.value); },
	    [](const ObjectConstant &c) { return c.name; },
	    [&](const StateVariableRef &v) {
		    if (v.variable >= 0 && static_cast<std::size_t>(v.variable) < names.size())
			    return names[static_cast<std::size_t>(v.variable)];
		    return fmt::format("(var{})", v.variable);
	    },
	    [&](const Arithmetic &a) {
		    std::string s = fmt::format("({}", to_string(a.op));
		    for (const auto &op : a.operands)
			    s += " " + to_string(*op, names);
		    return s + ")";
	    },
	    [&](const Trig &t) { return fmt::format("({} {})", to_string(t.op), to_string(*t.operand, names)); },
	}, term.node);
}

std::string to_string(const Formula &formula, std::span<const std::string> names)
{
	auto join = [&](const char *head, const std::vector<FormulaPtr> &fs) {
		std::string s = fmt::format("({}", head);
		for (const auto &f : fs)
			s += " " + to_string(*f, names);
		return s + ")";
	};
	return std::visit(overloaded{
	    [&](const Atom &a) {
		    return fmt::format("({} {} {})", to_string(a.rel), to_string(*a.lhs, names),
		                       to_string(*a.rhs, names));
	    },
	    [&](const Negation &n) { return fmt::format("(not {})", to_string(*n.operand, names)); },
	    [&](const Conjunction &c) { return join("and", c.operands); },
	    [&](const Disjunction &d) { return join("or", d.operands); },
	    [](const BoolConstant &b) { return std::string(b.value ? "(and)" : "(or)"); },
	}, formula.node);
}

} // namespace hyplan
