#include "hyplan/parser.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace hyplan {

namespace {

const char *const kKnownRequirements[] = {
    ":strips",           ":typing",       ":equality",        ":negative-preconditions",
    ":disjunctive-preconditions", ":numeric-fluents", ":fluents", ":object-fluents",
    ":processes",        ":time",         ":constraints",     ":continuous-effects",
};

std::optional<double> parse_number(std::string_view text)
{
	if (text.empty())
		return std::nullopt;
	std::string_view body = text;
	if (body.front() == '+')
		body.remove_prefix(1);
	if (body.empty())
		return std::nullopt;
	char first = body.front() == '-' && body.size() > 1 ? body[1] : body.front();
	if (!(std::isdigit(static_cast<unsigned char>(first)) || first == '.'))
		return std::nullopt;
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
	if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(value))
		return std::nullopt;
	return value;
}

[[noreturn]] void fail(const SExpr &at, const std::string &message)
{
	throw ParseError(at.span, message);
}

[[noreturn]] void type_fail(const SExpr &at, const std::string &message)
{
	throw TypeError(at.span, message);
}

const SExpr &expect_list(const SExpr &e, const char *what)
{
	if (!e.is_list)
		fail(e, fmt::format("expected {} but found '{}'", what, e.text));
	return e;
}

const std::string &expect_symbol(const SExpr &e, const char *what)
{
	if (e.is_list)
		fail(e, fmt::format("expected {} but found a list", what));
	return e.text;
}

bool is_subtype(const std::vector<ObjectType> &types, int type, int ancestor)
{
	for (int t = type; t >= 0; t = types[static_cast<std::size_t>(t)].parent)
		if (t == ancestor)
			return true;
	return false;
}

int find_type(const std::vector<ObjectType> &types, std::string_view name)
{
	for (std::size_t i = 0; i < types.size(); ++i)
		if (types[i].name == name)
			return static_cast<int>(i);
	return -1;
}

std::string type_name(const std::vector<ObjectType> &types, ValueType t)
{
	switch (t.kind) {
	case ValueKind::Real: return "number";
	case ValueKind::Integer: return "int";
	case ValueKind::Object: return types[static_cast<std::size_t>(t.object_type)].name;
	}
	return "?";
}

ValueType parse_value_type(const std::vector<ObjectType> &types, const SExpr &e)
{
	std::string name = lowercase(expect_symbol(e, "a type name"));
	if (name == "number" || name == "real")
		return {ValueKind::Real, -1};
	if (name == "int" || name == "integer")
		return {ValueKind::Integer, -1};
	int t = find_type(types, e.text);
	if (t < 0)
		fail(e, fmt::format("unknown type '{}'", e.text));
	return {ValueKind::Object, t};
}

/// Typed list `a b - t c - u d`: returns (name, type-expression) pairs where
/// the type expression is null for untyped trailing names.
std::vector<std::pair<const SExpr *, const SExpr *>> typed_list(const SExpr &list, std::size_t from)
{
	std::vector<std::pair<const SExpr *, const SExpr *>> out;
	std::size_t pending = 0;
	for (std::size_t i = from; i < list.size(); ++i) {
		const SExpr &item = list[i];
		if (item.is_atom() && item.text == "-") {
			if (i + 1 >= list.size())
				fail(item, "'-' must be followed by a type");
			if (pending == 0)
				fail(item, "'-' without preceding names");
			for (std::size_t k = out.size() - pending; k < out.size(); ++k)
				out[k].second = &list[i + 1];
			pending = 0;
			++i;
			continue;
		}
		out.emplace_back(&item, nullptr);
		++pending;
	}
	return out;
}

struct Binding {
	std::string name;
	int type;
	int object; ///< -1 while type-checking a schema
};

using VariableIndex = std::map<std::pair<int, std::vector<int>>, int>;

/// Converts S-expressions into typed ground terms and formulas.
class Builder {
public:
	struct Typed {
		TermPtr term;
		ValueType type;
	};

	Builder(const Domain &domain, const std::vector<ObjectType> &types, const std::vector<Object> &objects,
	        const VariableIndex *variables)
	    : domain_(domain), types_(types), objects_(objects), variables_(variables)
	{
	}

	std::vector<Binding> bindings;

	bool checking() const { return variables_ == nullptr; }

	Typed term(const SExpr &e)
	{
		if (e.is_atom())
			return symbol_term(e);
		if (e.items.empty())
			fail(e, "empty term");
		if (e[0].is_list)
			fail(e[0], "a term must start with a function symbol");
		std::string head = lowercase(e[0].text);
		if (head == "+" || head == "*")
			return arith(e, head == "+" ? ArithOp::Add : ArithOp::Mul, 2, 0);
		if (head == "-")
			return arith(e, ArithOp::Sub, 1, 0);
		if (head == "/")
			return arith(e, ArithOp::Div, 2, 2);
		if (head == "^" || head == "pow" || head == "expt")
			return arith(e, ArithOp::Pow, 2, 2);
		if (head == "nthroot")
			return arith(e, ArithOp::NthRoot, 2, 2);
		if (head == "sqrt") {
			if (e.size() != 2)
				fail(e, "sqrt takes one argument");
			auto x = numeric(e[1]);
			return {nthroot(x, constant(2.0)), {ValueKind::Real, -1}};
		}
		if (head == "sin" || head == "cos" || head == "tan") {
			if (e.size() != 2)
				fail(e, fmt::format("{} takes one argument", head));
			TrigOp op = head == "sin" ? TrigOp::Sin : head == "cos" ? TrigOp::Cos : TrigOp::Tan;
			return {trig(op, numeric(e[1])), {ValueKind::Real, -1}};
		}
		return fluent_term(e);
	}

	FormulaPtr formula(const SExpr &e)
	{
		if (e.is_atom()) {
			std::string s = lowercase(e.text);
			if (s == "true")
				return truth(true);
			if (s == "false")
				return truth(false);
			fail(e, fmt::format("expected a formula but found '{}'", e.text));
		}
		if (e.items.empty())
			fail(e, "empty formula");
		std::string head = e.head();
		if (head == "and" || head == "or") {
			std::vector<FormulaPtr> parts;
			for (std::size_t i = 1; i < e.size(); ++i)
				parts.push_back(formula(e[i]));
			return head == "and" ? conjunction(std::move(parts)) : disjunction(std::move(parts));
		}
		if (head == "not") {
			if (e.size() != 2)
				fail(e, "not takes one argument");
			return negation(formula(e[1]));
		}
		if (head == "imply") {
			if (e.size() != 3)
				fail(e, "imply takes two arguments");
			return disjunction({negation(formula(e[1])), formula(e[2])});
		}
		if (auto rel = relation(head))
			return relational(e, *rel);
		fail(e, fmt::format("unknown connective or relation '{}'", e[0].is_atom() ? e[0].text : "(...)"));
	}

	static std::optional<Relation> relation(const std::string &head)
	{
		if (head == "=")
			return Relation::Eq;
		if (head == "<")
			return Relation::Lt;
		if (head == ">")
			return Relation::Gt;
		if (head == "<=")
			return Relation::Le;
		if (head == ">=")
			return Relation::Ge;
		return std::nullopt;
	}

	FormulaPtr relational(const SExpr &e, Relation rel)
	{
		if (e.size() != 3)
			fail(e, fmt::format("relation {} takes two arguments", to_string(rel)));
		auto l = term(e[1]);
		auto r = term(e[2]);
		if (l.type.numeric() != r.type.numeric())
			type_fail(e, fmt::format("cannot compare {} with {}", type_name(types_, l.type), type_name(types_, r.type)));
		if (!l.type.numeric()) {
			if (rel != Relation::Eq)
				type_fail(e, "ordering relations are only defined over numbers");
			if (!is_subtype(types_, l.type.object_type, r.type.object_type) &&
			    !is_subtype(types_, r.type.object_type, l.type.object_type))
				type_fail(e, fmt::format("cannot compare {} with {}", type_name(types_, l.type),
				                         type_name(types_, r.type)));
		}
		return atom(l.term, rel, r.term);
	}

	/// Returns the variable id (or -1 while checking) of a fluent reference.
	std::pair<int, ValueType> target(const SExpr &e)
	{
		if (e.is_atom() && !is_nullary_fluent(e.text))
			fail(e, fmt::format("expected a fluent reference but found '{}'", e.text));
		auto t = term(e);
		const auto *ref = std::get_if<StateVariableRef>(&t.term->node);
		if (!ref)
			fail(e, "effect target must be a fluent reference");
		return {ref->variable, t.type};
	}

	void check_assignable(const SExpr &at, ValueType target, ValueType value)
	{
		if (target.numeric() != value.numeric())
			type_fail(at, fmt::format("cannot assign {} to a {} fluent", type_name(types_, value),
			                          type_name(types_, target)));
		if (!target.numeric() && !is_subtype(types_, value.object_type, target.object_type))
			type_fail(at, fmt::format("cannot assign {} to a {} fluent", type_name(types_, value),
			                          type_name(types_, target)));
	}

	std::vector<Assignment> action_effects(const SExpr &e)
	{
		std::vector<Assignment> out;
		collect_action_effects(e, out);
		return out;
	}

	std::vector<RateEffect> process_effects(const SExpr &e)
	{
		std::vector<RateEffect> out;
		collect_process_effects(e, out);
		return out;
	}

private:
	bool is_nullary_fluent(const std::string &name) const
	{
		return std::any_of(domain_.fluents.begin(), domain_.fluents.end(),
		                   [&](const FluentDecl &f) { return f.name == name && f.argument_types.empty(); });
	}

	int find_fluent(const std::string &name) const
	{
		for (std::size_t i = 0; i < domain_.fluents.size(); ++i)
			if (domain_.fluents[i].name == name)
				return static_cast<int>(i);
		return -1;
	}

	std::optional<Typed> object_term(const SExpr &e)
	{
		if (!e.text.empty() && e.text[0] == '?') {
			for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
				if (it->name == e.text) {
					std::string name = it->object >= 0 ? objects_[static_cast<std::size_t>(it->object)].name : it->name;
					return Typed{object_constant(it->object, name), {ValueKind::Object, it->type}};
				}
			fail(e, fmt::format("unbound parameter '{}'", e.text));
		}
		for (std::size_t i = 0; i < objects_.size(); ++i)
			if (objects_[i].name == e.text)
				return Typed{object_constant(static_cast<int>(i), e.text), {ValueKind::Object, objects_[i].type}};
		return std::nullopt;
	}

	Typed symbol_term(const SExpr &e)
	{
		if (auto v = parse_number(e.text))
			return {constant(*v), {ValueKind::Real, -1}};
		if (e.text == "#t" || e.text == "#T")
			type_fail(e, "#t may only appear as (* #t EXPR) in a process effect");
		if (auto o = object_term(e))
			return *o;
		if (is_nullary_fluent(e.text)) {
			SExpr wrapped;
			wrapped.is_list = true;
			wrapped.span = e.span;
			wrapped.items.push_back(e);
			return fluent_term(wrapped);
		}
		fail(e, fmt::format("unknown symbol '{}'", e.text));
	}

	TermPtr numeric(const SExpr &e)
	{
		auto t = term(e);
		if (!t.type.numeric())
			type_fail(e, fmt::format("arithmetic over a {} term", type_name(types_, t.type)));
		return t.term;
	}

	Typed arith(const SExpr &e, ArithOp op, std::size_t min_args, std::size_t exact)
	{
		std::size_t n = e.size() - 1;
		if (n < min_args || (exact && n != exact))
			fail(e, fmt::format("wrong number of arguments for '{}'", e[0].text));
		std::vector<TermPtr> operands;
		for (std::size_t i = 1; i < e.size(); ++i)
			operands.push_back(numeric(e[i]));
		return {arithmetic(op, std::move(operands)), {ValueKind::Real, -1}};
	}

	Typed fluent_term(const SExpr &e)
	{
		int f = find_fluent(e[0].text);
		if (f < 0)
			fail(e[0], fmt::format("unknown function '{}'", e[0].text));
		const auto &decl = domain_.fluents[static_cast<std::size_t>(f)];
		if (e.size() - 1 != decl.argument_types.size())
			fail(e, fmt::format("'{}' expects {} arguments", decl.name, decl.argument_types.size()));
		std::vector<int> args;
		bool bound = true;
		for (std::size_t i = 1; i < e.size(); ++i) {
			const SExpr &a = e[i];
			if (a.is_list)
				type_fail(a, "fluent arguments must be objects or parameters");
			auto o = object_term(a);
			if (!o)
				fail(a, fmt::format("unknown object '{}'", a.text));
			int expected = decl.argument_types[i - 1];
			if (!is_subtype(types_, o->type.object_type, expected))
				type_fail(a, fmt::format("argument '{}' of '{}' must be of type {}", a.text, decl.name,
				                         types_[static_cast<std::size_t>(expected)].name));
			int id = std::get<ObjectConstant>(o->term->node).id;
			bound = bound && id >= 0;
			args.push_back(id);
		}
		if (checking() || !bound)
			return {variable(-1), decl.value_type};
		auto it = variables_->find({f, args});
		if (it == variables_->end())
			fail(e, "fluent reference does not name a state variable");
		return {variable(it->second), decl.value_type};
	}

	void collect_action_effects(const SExpr &e, std::vector<Assignment> &out)
	{
		expect_list(e, "an effect");
		std::string head = e.head();
		if (e.items.empty() || head == "and") {
			for (std::size_t i = 1; i < e.size(); ++i)
				collect_action_effects(e[i], out);
			return;
		}
		if (e.size() != 3)
			fail(e, fmt::format("malformed effect '{}'", head));
		auto [var, type] = target(e[1]);
		auto value = term(e[2]);
		TermPtr rhs;
		if (head == "assign") {
			check_assignable(e, type, value.type);
			rhs = value.term;
		} else if (head == "increase" || head == "decrease" || head == "scale-up" || head == "scale-down") {
			if (!type.numeric() || !value.type.numeric())
				type_fail(e, fmt::format("{} needs numeric operands", head));
			ArithOp op = head == "increase" ? ArithOp::Add
			           : head == "decrease" ? ArithOp::Sub
			           : head == "scale-up" ? ArithOp::Mul
			                                : ArithOp::Div;
			rhs = arithmetic(op, {variable(var), value.term});
		} else {
			fail(e, fmt::format("unknown effect '{}'", head));
		}
		out.push_back({var, rhs});
	}

	void collect_process_effects(const SExpr &e, std::vector<RateEffect> &out)
	{
		expect_list(e, "an effect");
		std::string head = e.head();
		if (e.items.empty() || head == "and") {
			for (std::size_t i = 1; i < e.size(); ++i)
				collect_process_effects(e[i], out);
			return;
		}
		if (head != "increase" && head != "decrease")
			fail(e, "process effects must be (increase F (* #t EXPR)) or (decrease F (* #t EXPR))");
		if (e.size() != 3)
			fail(e, fmt::format("malformed effect '{}'", head));
		auto [var, type] = target(e[1]);
		if (type.kind != ValueKind::Real)
			type_fail(e[1], "process effects may only change real-valued fluents");
		const SExpr &rate = e[2];
		if (!rate.is_list || rate.size() != 3 || rate.head() != "*" || !rate[1].is_atom() ||
		    lowercase(rate[1].text) != "#t")
			fail(rate, "process rate must have the form (* #t EXPR)");
		TermPtr r = numeric(rate[2]);
		out.push_back({var, head == "increase" ? r : neg(r)});
	}

	const Domain &domain_;
	const std::vector<ObjectType> &types_;
	const std::vector<Object> &objects_;
	const VariableIndex *variables_;
};

std::vector<ParameterDecl> parse_parameters(const std::vector<ObjectType> &types, const SExpr &list)
{
	expect_list(list, "a parameter list");
	std::vector<ParameterDecl> out;
	for (auto [name, type] : typed_list(list, 0)) {
		const std::string &n = expect_symbol(*name, "a parameter");
		if (n.empty() || n[0] != '?')
			fail(*name, fmt::format("parameter '{}' must start with '?'", n));
		int t = 0;
		if (type) {
			auto vt = parse_value_type(types, *type);
			if (vt.kind != ValueKind::Object)
				type_fail(*type, "parameters range over object types");
			t = vt.object_type;
		}
		out.push_back({n, t});
	}
	return out;
}

Schema parse_schema(const Domain &domain, const SExpr &e, bool process)
{
	if (e.size() < 2)
		fail(e, "schema needs a name");
	Schema s;
	s.name = expect_symbol(e[1], "a schema name");
	s.span = e.span;
	SExpr empty_and;
	empty_and.is_list = true;
	empty_and.span = e.span;
	s.precondition = empty_and;
	s.effect = empty_and;
	bool has_effect = false;
	for (std::size_t i = 2; i < e.size(); i += 2) {
		const SExpr &key = e[i];
		if (i + 1 >= e.size())
			fail(key, "keyword without a value");
		std::string k = lowercase(expect_symbol(key, "a schema keyword"));
		if (k == ":parameters")
			s.parameters = parse_parameters(domain.types, e[i + 1]);
		else if (k == ":precondition" || k == ":condition")
			s.precondition = e[i + 1];
		else if (k == ":effect") {
			s.effect = e[i + 1];
			has_effect = true;
		} else
			fail(key, fmt::format("unknown schema keyword '{}'", key.text));
	}
	if (process && !has_effect)
		fail(e, fmt::format("process {} has no effect", s.name));

	// type-check the bodies once, with parameters left unbound
	std::vector<Object> objects = domain.constants;
	Builder b(domain, domain.types, objects, nullptr);
	for (const auto &p : s.parameters)
		b.bindings.push_back({p.name, p.type, -1});
	b.formula(s.precondition);
	if (process)
		b.process_effects(s.effect);
	else
		b.action_effects(s.effect);
	return s;
}

void add_object(std::vector<ObjectType> &types, std::vector<Object> &objects, const SExpr &name, int type,
                bool constant)
{
	for (const auto &o : objects)
		if (o.name == name.text)
			fail(name, fmt::format("object '{}' declared twice", name.text));
	int id = static_cast<int>(objects.size());
	objects.push_back({name.text, type, constant});
	for (int t = type; t >= 0; t = types[static_cast<std::size_t>(t)].parent)
		types[static_cast<std::size_t>(t)].objects.push_back(id);
}

void parse_objects(std::vector<ObjectType> &types, std::vector<Object> &objects, const SExpr &section, bool constant)
{
	for (auto [name, type] : typed_list(section, 1)) {
		expect_symbol(*name, "an object name");
		int t = 0;
		if (type) {
			auto vt = parse_value_type(types, *type);
			if (vt.kind != ValueKind::Object)
				type_fail(*type, "objects must have an object type");
			t = vt.object_type;
		}
		add_object(types, objects, *name, t, constant);
	}
}

void parse_types(Domain &d, const SExpr &section)
{
	for (auto [name, parent] : typed_list(section, 1)) {
		const std::string &n = expect_symbol(*name, "a type name");
		std::string low = lowercase(n);
		if (low == "number" || low == "int" || low == "integer" || low == "real")
			fail(*name, fmt::format("'{}' is a built-in type", n));
		if (find_type(d.types, n) >= 0) {
			if (n == "object")
				continue;
			fail(*name, fmt::format("type '{}' declared twice", n));
		}
		d.types.push_back({n, 0, {}});
	}
	// second pass: parents may be declared later in the list
	for (auto [name, parent] : typed_list(section, 1)) {
		if (!parent || name->text == "object")
			continue;
		int p = find_type(d.types, expect_symbol(*parent, "a type name"));
		if (p < 0)
			fail(*parent, fmt::format("unknown type '{}'", parent->text));
		int t = find_type(d.types, name->text);
		if (is_subtype(d.types, p, t))
			fail(*parent, "cyclic type hierarchy");
		d.types[static_cast<std::size_t>(t)].parent = p;
	}
}

void parse_functions(Domain &d, const SExpr &section)
{
	std::vector<FluentDecl> pending;
	auto flush = [&](ValueType vt) {
		for (auto &f : pending) {
			f.value_type = vt;
			d.fluents.push_back(std::move(f));
		}
		pending.clear();
	};
	for (std::size_t i = 1; i < section.size(); ++i) {
		const SExpr &item = section[i];
		if (item.is_atom() && item.text == "-") {
			if (i + 1 >= section.size())
				fail(item, "'-' must be followed by a type");
			if (pending.empty())
				fail(item, "'-' without preceding function declarations");
			flush(parse_value_type(d.types, section[i + 1]));
			++i;
			continue;
		}
		expect_list(item, "a function declaration");
		if (item.items.empty())
			fail(item, "empty function declaration");
		FluentDecl f;
		f.name = expect_symbol(item[0], "a function name");
		for (const auto &existing : d.fluents)
			if (existing.name == f.name)
				fail(item[0], fmt::format("function '{}' declared twice", f.name));
		for (const auto &p : parse_parameters(d.types, [&] {
			     SExpr rest;
			     rest.is_list = true;
			     rest.span = item.span;
			     rest.items.assign(item.items.begin() + 1, item.items.end());
			     return rest;
		     }()))
			f.argument_types.push_back(p.type);
		pending.push_back(std::move(f));
	}
	flush({ValueKind::Real, -1});
}

const SExpr &single_document(const std::vector<SExpr> &top, const std::string &file, const char *what)
{
	if (top.size() != 1)
		throw ParseError({file, 1, 1}, fmt::format("expected exactly one (define ...) {} form", what));
	const SExpr &d = top[0];
	if (!d.is_list || d.head() != "define" || d.size() < 2 || !d[1].is_list || d[1].size() != 2)
		fail(d, fmt::format("expected (define ({} NAME) ...)", what));
	if (d[1].head() != what)
		fail(d[1], fmt::format("expected ({} NAME)", what));
	return d;
}

std::vector<std::vector<int>> cartesian(const std::vector<ObjectType> &types, const std::vector<int> &arg_types)
{
	std::vector<std::vector<int>> out{{}};
	for (int t : arg_types) {
		std::vector<std::vector<int>> next;
		for (const auto &prefix : out)
			for (int o : types[static_cast<std::size_t>(t)].objects) {
				auto v = prefix;
				v.push_back(o);
				next.push_back(std::move(v));
			}
		out = std::move(next);
	}
	return out;
}

bool is_literal(const Formula &f)
{
	if (std::holds_alternative<Atom>(f.node))
		return true;
	if (const auto *n = std::get_if<Negation>(&f.node))
		return std::holds_alternative<Atom>(n->operand->node);
	return false;
}

std::vector<FormulaPtr> cnf_clauses(Builder &b, const SExpr &e)
{
	std::vector<FormulaPtr> clauses;
	auto clause = [&](const SExpr &c) {
		FormulaPtr f = b.formula(c);
		if (is_literal(*f)) {
			clauses.push_back(f);
			return;
		}
		const auto *d = std::get_if<Disjunction>(&f->node);
		if (!d)
			throw CnfError(c.span, "constraint clause must be a relational atom or a disjunction of them");
		for (const auto &lit : d->operands)
			if (!is_literal(*lit))
				throw CnfError(c.span, "constraint clause must be a disjunction of relational atoms");
		clauses.push_back(f);
	};
	if (e.is_list && e.head() == "and") {
		for (std::size_t i = 1; i < e.size(); ++i)
			clause(e[i]);
	} else {
		clause(e);
	}
	return clauses;
}

void parse_bounds(Task &task, const SExpr &section)
{
	for (std::size_t i = 1; i < section.size(); i += 2) {
		const SExpr &key = section[i];
		if (i + 1 >= section.size())
			fail(key, "bound without a value");
		auto v = section[i + 1].is_atom() ? parse_number(section[i + 1].text) : std::nullopt;
		if (!v)
			fail(section[i + 1], "bound value must be a number");
		std::string k = lowercase(expect_symbol(key, "a bound keyword"));
		if (k == ":delta-max") {
			task.config.delta_max = *v;
			task.declared_delta_max = true;
		} else if (k == ":delta-min")
			task.config.delta_min = *v;
		else if (k == ":delta-z")
			task.config.delta_z = *v;
		else if (k == ":delta-h-factor")
			task.config.delta_h_factor = *v;
		else
			fail(key, fmt::format("unknown bound '{}'", key.text));
	}
}

std::string read_file(const std::filesystem::path &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ParseError({path.string(), 1, 1}, "cannot open file");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace

Domain parse_domain(std::string_view text, const std::string &file)
{
	auto top = read_sexprs(text, file);
	const SExpr &d = single_document(top, file, "domain");
	Domain dom;
	dom.name = expect_symbol(d[1][1], "a domain name");
	dom.types.push_back({"object", -1, {}});
	for (std::size_t i = 2; i < d.size(); ++i) {
		const SExpr &section = expect_list(d[i], "a domain section");
		std::string head = section.head();
		if (head == ":requirements") {
			for (std::size_t k = 1; k < section.size(); ++k) {
				std::string r = lowercase(expect_symbol(section[k], "a requirement"));
				if (std::find(std::begin(kKnownRequirements), std::end(kKnownRequirements), r) ==
				    std::end(kKnownRequirements))
					fail(section[k], fmt::format("unsupported requirement '{}'", section[k].text));
				dom.requirements.push_back(r);
			}
		} else if (head == ":types") {
			parse_types(dom, section);
		} else if (head == ":constants") {
			parse_objects(dom.types, dom.constants, section, true);
		} else if (head == ":functions") {
			parse_functions(dom, section);
		} else if (head == ":action") {
			dom.actions.push_back(parse_schema(dom, section, false));
		} else if (head == ":process") {
			dom.processes.push_back(parse_schema(dom, section, true));
		} else if (head == ":predicates") {
			fail(section, "predicates are not supported; declare object-valued functions instead");
		} else if (head == ":event" || head == ":durative-action") {
			fail(section, fmt::format("{} is not supported", section[0].text));
		} else {
			fail(section, fmt::format("unknown domain section '{}'", section.head()));
		}
	}
	return dom;
}

Task parse_problem(std::string_view text, const Domain &domain, const std::string &file)
{
	auto top = read_sexprs(text, file);
	const SExpr &d = single_document(top, file, "problem");
	Task task;
	task.domain_name = domain.name;
	task.problem_name = expect_symbol(d[1][1], "a problem name");
	task.types = domain.types;
	for (auto &t : task.types)
		t.objects.clear();
	for (const auto &c : domain.constants)
		add_object(task.types, task.objects, SExpr{false, c.name, {}, {}}, c.type, true);

	const SExpr *init = nullptr;
	const SExpr *goal = nullptr;
	const SExpr *constraints = nullptr;
	bool explicit_dz = false;
	for (std::size_t i = 2; i < d.size(); ++i) {
		const SExpr &section = expect_list(d[i], "a problem section");
		std::string head = section.head();
		if (head == ":domain") {
			if (section.size() != 2 || lowercase(expect_symbol(section[1], "a domain name")) != lowercase(domain.name))
				fail(section, fmt::format("problem is for a different domain than '{}'", domain.name));
		} else if (head == ":objects") {
			parse_objects(task.types, task.objects, section, false);
		} else if (head == ":init") {
			init = &section;
		} else if (head == ":goal") {
			if (section.size() != 2)
				fail(section, ":goal takes one formula");
			goal = &section[1];
		} else if (head == ":constraints") {
			if (section.size() != 2)
				fail(section, ":constraints takes one formula");
			constraints = &section[1];
		} else if (head == ":bounds") {
			parse_bounds(task, section);
			for (std::size_t k = 1; k < section.size(); k += 2)
				explicit_dz = explicit_dz || section[k].is_keyword(":delta-z");
		} else if (head == ":metric") {
			// only makespan is tracked
		} else {
			fail(section, fmt::format("unknown problem section '{}'", section.head()));
		}
	}
	if (!explicit_dz)
		task.config.delta_z = task.config.delta_max / 10.0;
	if (!goal)
		fail(d, "problem has no :goal");

	task.fluents = domain.fluents;
	VariableIndex index;
	for (std::size_t f = 0; f < domain.fluents.size(); ++f) {
		const auto &decl = domain.fluents[f];
		for (auto &args : cartesian(task.types, decl.argument_types)) {
			std::vector<std::string> names;
			for (int a : args)
				names.push_back(task.objects[static_cast<std::size_t>(a)].name);
			int id = static_cast<int>(task.variables.size());
			task.variables.push_back({static_cast<int>(f), args, ground_name(decl.name, names), decl.value_type});
			index[{static_cast<int>(f), args}] = id;
		}
	}

	Builder b(domain, task.types, task.objects, &index);
	const auto nvars = static_cast<Eigen::Index>(task.variables.size());
	task.initial.values = Eigen::VectorXd::Constant(nvars, std::numeric_limits<double>::quiet_NaN());
	std::vector<bool> defined(task.variables.size(), false);
	if (init) {
		for (std::size_t i = 1; i < init->size(); ++i) {
			const SExpr &e = (*init)[i];
			if (!e.is_list || e.head() != "=" || e.size() != 3)
				fail(e, "initial values must be written (= (f args) value)");
			auto [var, type] = b.target(e[1]);
			auto value = b.term(e[2]);
			b.check_assignable(e, type, value.type);
			std::vector<int> mentioned;
			collect_variables(*value.term, mentioned);
			if (!mentioned.empty())
				fail(e[2], "initial values must be constant");
			if (defined[static_cast<std::size_t>(var)])
				fail(e, fmt::format("{} is initialised twice", task.variables[static_cast<std::size_t>(var)].name));
			double v = 0.0;
			try {
				v = eval_term(*value.term, task.initial);
			} catch (const EvaluationError &err) {
				fail(e[2], err.what());
			}
			if (type.kind == ValueKind::Integer && std::trunc(v) != v)
				type_fail(e[2], "integer fluent initialised with a non-integral value");
			task.initial[var] = v;
			defined[static_cast<std::size_t>(var)] = true;
		}
	}
	for (std::size_t v = 0; v < defined.size(); ++v)
		if (!defined[v])
			fail(init ? *init : d, fmt::format("initial state does not define {}", task.variables[v].name));

	auto ground = [&](const Schema &s, auto &&emit) {
		std::vector<int> ptypes;
		for (const auto &p : s.parameters)
			ptypes.push_back(p.type);
		for (const auto &args : cartesian(task.types, ptypes)) {
			b.bindings.clear();
			std::string name = s.name;
			for (std::size_t k = 0; k < args.size(); ++k) {
				b.bindings.push_back({s.parameters[k].name, s.parameters[k].type, args[k]});
				name += " " + task.objects[static_cast<std::size_t>(args[k])].name;
			}
			emit(name);
		}
		b.bindings.clear();
	};
	for (const auto &s : domain.actions)
		ground(s, [&](const std::string &name) {
			task.actions.push_back({name, b.formula(s.precondition), b.action_effects(s.effect)});
		});
	for (const auto &s : domain.processes)
		ground(s, [&](const std::string &name) {
			task.processes.push_back({name, b.formula(s.precondition), b.process_effects(s.effect)});
		});

	task.goal = b.formula(*goal);
	if (constraints)
		task.constraints = cnf_clauses(b, *constraints);

	try {
		validate_task(task);
	} catch (const ModelError &e) {
		fail(d, e.what());
	}
	return task;
}

Task load_task(const std::filesystem::path &domain_file, const std::filesystem::path &problem_file)
{
	Domain dom = parse_domain(read_file(domain_file), domain_file.string());
	return parse_problem(read_file(problem_file), dom, problem_file.string());
}

namespace {

std::string indent_sexpr(const SExpr &e) { return to_string(e); }

std::string print_typed(const std::vector<ObjectType> &types, ValueType t)
{
	return type_name(types, t);
}

} // namespace

std::string print_domain(const Domain &domain)
{
	std::string out = fmt::format("(define (domain {})\n", domain.name);
	if (!domain.requirements.empty()) {
		out += "  (:requirements";
		for (const auto &r : domain.requirements)
			out += " " + r;
		out += ")\n";
	}
	if (domain.types.size() > 1) {
		out += "  (:types";
		for (std::size_t i = 1; i < domain.types.size(); ++i) {
			const auto &t = domain.types[i];
			out += fmt::format(" {} - {}", t.name, domain.types[static_cast<std::size_t>(t.parent)].name);
		}
		out += ")\n";
	}
	if (!domain.constants.empty()) {
		out += "  (:constants";
		for (const auto &c : domain.constants)
			out += fmt::format(" {} - {}", c.name, domain.types[static_cast<std::size_t>(c.type)].name);
		out += ")\n";
	}
	if (!domain.fluents.empty()) {
		out += "  (:functions";
		for (const auto &f : domain.fluents) {
			out += " (" + f.name;
			for (std::size_t k = 0; k < f.argument_types.size(); ++k)
				out += fmt::format(" ?a{} - {}", k, domain.types[static_cast<std::size_t>(f.argument_types[k])].name);
			out += ") - " + print_typed(domain.types, f.value_type);
		}
		out += ")\n";
	}
	auto schema = [&](const char *kind, const Schema &s) {
		out += fmt::format("  ({} {}\n    :parameters (", kind, s.name);
		for (std::size_t k = 0; k < s.parameters.size(); ++k)
			out += fmt::format("{}{} - {}", k ? " " : "", s.parameters[k].name,
			                   domain.types[static_cast<std::size_t>(s.parameters[k].type)].name);
		out += ")\n";
		out += fmt::format("    :precondition {}\n", indent_sexpr(s.precondition));
		out += fmt::format("    :effect {})\n", indent_sexpr(s.effect));
	};
	for (const auto &s : domain.actions)
		schema(":action", s);
	for (const auto &s : domain.processes)
		schema(":process", s);
	return out + ")\n";
}

std::string print_problem(const Task &task)
{
	auto names = task.variable_names();
	std::string out = fmt::format("(define (problem {})\n  (:domain {})\n", task.problem_name, task.domain_name);
	bool any = false;
	for (const auto &o : task.objects) {
		if (o.is_constant)
			continue;
		if (!any)
			out += "  (:objects";
		any = true;
		out += fmt::format(" {} - {}", o.name, task.types[static_cast<std::size_t>(o.type)].name);
	}
	if (any)
		out += ")\n";
	out += "  (:init";
	for (std::size_t v = 0; v < task.variables.size(); ++v) {
		const auto &var = task.variables[v];
		double value = task.initial[static_cast<int>(v)];
		std::string text = var.type.kind == ValueKind::Object
		                       ? task.objects[static_cast<std::size_t>(value)].name
		                       : fmt::format("{}", value);
		out += fmt::format("\n    (= {} {})", var.name, text);
	}
	out += ")\n";
	out += fmt::format("  (:goal {})\n", to_string(*task.goal, names));
	if (!task.constraints.empty()) {
		out += "  (:constraints (and";
		for (const auto &c : task.constraints)
			out += "\n    " + to_string(*c, names);
		out += "))\n";
	}
	const auto &c = task.config;
	out += fmt::format("  (:bounds :delta-max {} :delta-min {} :delta-z {} :delta-h-factor {})\n", c.delta_max,
	                   c.delta_min, c.delta_z, c.delta_h_factor);
	return out + ")\n";
}

} // namespace hyplan
