#include "hyplan/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hyplan {

namespace {

template <class... Ts>
struct overloaded : Ts... {
	using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp(double v)
{
	return std::clamp(v, -kIntervalClamp, kIntervalClamp);
}

Interval make(double lo, double hi)
{
	if (std::isnan(lo) || std::isnan(hi))
		return Interval::whole();
	return {clamp(lo), clamp(hi)};
}

bool is_point_integer(Interval x)
{
	return x.lo == x.hi && std::trunc(x.lo) == x.lo;
}

Interval reciprocal(Interval x)
{
	if (x.contains(0.0))
		return Interval::whole();
	return make(1.0 / x.hi, 1.0 / x.lo);
}

Interval integer_power(Interval b, long n)
{
	if (n == 0)
		return Interval::point(1.0);
	if (n < 0)
		return reciprocal(integer_power(b, -n));
	double p = static_cast<double>(n);
	double a = std::pow(b.lo, p);
	double c = std::pow(b.hi, p);
	if (n % 2 == 1)
		return make(a, c);
	if (b.lo >= 0.0)
		return make(a, c);
	if (b.hi <= 0.0)
		return make(c, a);
	return make(0.0, std::max(a, c));
}

bool contains_critical_point(Interval x, double phase, double period)
{
	// is there k with phase + k * period in [lo, hi]?
	double k = std::ceil((x.lo - phase) / period);
	return phase + k * period <= x.hi;
}

} // namespace

Interval hull(Interval a, Interval b)
{
	return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval operator+(Interval a, Interval b) { return make(a.lo + b.lo, a.hi + b.hi); }
Interval operator-(Interval a, Interval b) { return make(a.lo - b.hi, a.hi - b.lo); }
Interval operator-(Interval a) { return make(-a.hi, -a.lo); }

Interval operator*(Interval a, Interval b)
{
	double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
	return make(*std::min_element(std::begin(p), std::end(p)), *std::max_element(std::begin(p), std::end(p)));
}

Interval operator/(Interval a, Interval b)
{
	if (b.contains(0.0))
		return Interval::whole();
	return a * reciprocal(b);
}

Interval ipow(Interval base, Interval exponent)
{
	if (is_point_integer(exponent) && std::abs(exponent.lo) < 1e9)
		return integer_power(base, static_cast<long>(exponent.lo));
	if (base.lo < 0.0)
		return Interval::whole();
	if (base.lo == 0.0 && exponent.lo < 0.0)
		return Interval::whole();
	// non-negative base: monotone in each argument, the extremes are corners
	double c[] = {std::pow(base.lo, exponent.lo), std::pow(base.lo, exponent.hi), std::pow(base.hi, exponent.lo),
	              std::pow(base.hi, exponent.hi)};
	return make(*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c)));
}

Interval iroot(Interval x, Interval degree)
{
	if (!is_point_integer(degree) || degree.lo < 1.0)
		return Interval::whole();
	double n = degree.lo;
	auto root = [n](double v) { return v < 0.0 ? -std::pow(-v, 1.0 / n) : std::pow(v, 1.0 / n); };
	if (std::fmod(n, 2.0) != 0.0)
		return make(root(x.lo), root(x.hi));
	if (x.hi < 0.0)
		return Interval::whole();
	return make(root(std::max(x.lo, 0.0)), root(x.hi));
}

Interval isin(Interval x)
{
	constexpr double pi = std::numbers::pi;
	if (x.hi - x.lo >= 2.0 * pi)
		return {-1.0, 1.0};
	double a = std::sin(x.lo);
	double b = std::sin(x.hi);
	Interval r{std::min(a, b), std::max(a, b)};
	if (contains_critical_point(x, pi / 2.0, 2.0 * pi))
		r.hi = 1.0;
	if (contains_critical_point(x, -pi / 2.0, 2.0 * pi))
		r.lo = -1.0;
	return r;
}

Interval icos(Interval x)
{
	constexpr double pi = std::numbers::pi;
	if (x.hi - x.lo >= 2.0 * pi)
		return {-1.0, 1.0};
	double a = std::cos(x.lo);
	double b = std::cos(x.hi);
	Interval r{std::min(a, b), std::max(a, b)};
	if (contains_critical_point(x, 0.0, 2.0 * pi))
		r.hi = 1.0;
	if (contains_critical_point(x, pi, 2.0 * pi))
		r.lo = -1.0;
	return r;
}

Interval itan(Interval x)
{
	constexpr double pi = std::numbers::pi;
	if (x.hi - x.lo >= pi || contains_critical_point(x, pi / 2.0, pi))
		return Interval::whole();
	return make(std::tan(x.lo), std::tan(x.hi));
}

IntervalBox IntervalBox::from_state(const Task &task, const State &state)
{
	IntervalBox box;
	box.lo = state.values.array();
	box.hi = state.values.array();
	box.members.resize(task.variables.size());
	for (std::size_t v = 0; v < task.variables.size(); ++v)
		if (task.variables[v].type.kind == ValueKind::Object) {
			box.members[v].assign(task.objects.size(), false);
			box.members[v][static_cast<std::size_t>(state[static_cast<int>(v)])] = true;
		}
	return box;
}

bool IntervalBox::contains(const IntervalBox &inner) const
{
	if ((lo > inner.lo).any() || (hi < inner.hi).any())
		return false;
	for (std::size_t v = 0; v < members.size(); ++v)
		for (std::size_t o = 0; o < members[v].size(); ++o)
			if (inner.members[v][o] && !members[v][o])
				return false;
	return true;
}

Interval interval_eval(const Term &term, const IntervalBox &box)
{
	return std::visit(overloaded{
	    [](const NumericConstant &c) { return Interval::point(c.value); },
	    [](const ObjectConstant &c) { return Interval::point(c.id); },
	    [&](const StateVariableRef &v) { return box.interval(v.variable); },
	    [&](const Arithmetic &a) {
		    const auto &ops = a.operands;
		    Interval r = interval_eval(*ops[0], box);
		    switch (a.op) {
		    case ArithOp::Add:
			    for (std::size_t i = 1; i < ops.size(); ++i)
				    r = r + interval_eval(*ops[i], box);
			    return r;
		    case ArithOp::Sub:
			    if (ops.size() == 1)
				    return -r;
			    for (std::size_t i = 1; i < ops.size(); ++i)
				    r = r - interval_eval(*ops[i], box);
			    return r;
		    case ArithOp::Mul:
			    for (std::size_t i = 1; i < ops.size(); ++i)
				    r = r * interval_eval(*ops[i], box);
			    return r;
		    case ArithOp::Div: return r / interval_eval(*ops[1], box);
		    case ArithOp::Pow: return ipow(r, interval_eval(*ops[1], box));
		    case ArithOp::NthRoot: return iroot(r, interval_eval(*ops[1], box));
		    }
		    return Interval::whole();
	    },
	    [&](const Trig &t) {
		    Interval x = interval_eval(*t.operand, box);
		    switch (t.op) {
		    case TrigOp::Sin: return isin(x);
		    case TrigOp::Cos: return icos(x);
		    case TrigOp::Tan: return itan(x);
		    }
		    return Interval::whole();
	    },
	}, term.node);
}

namespace {

bool is_object_term(const Term &term, const IntervalBox &box)
{
	if (std::holds_alternative<ObjectConstant>(term.node))
		return true;
	if (const auto *v = std::get_if<StateVariableRef>(&term.node))
		return !box.members[static_cast<std::size_t>(v->variable)].empty();
	return false;
}

bool satisfiable(const Formula &f, const IntervalBox &box, bool negated)
{
	return std::visit(overloaded{
	    [&](const BoolConstant &b) { return b.value != negated; },
	    [&](const Negation &n) { return satisfiable(*n.operand, box, !negated); },
	    [&](const Conjunction &c) {
		    if (negated)
			    return std::any_of(c.operands.begin(), c.operands.end(),
			                       [&](const FormulaPtr &g) { return satisfiable(*g, box, true); });
		    return std::all_of(c.operands.begin(), c.operands.end(),
		                       [&](const FormulaPtr &g) { return satisfiable(*g, box, false); });
	    },
	    [&](const Disjunction &d) {
		    if (negated)
			    return std::all_of(d.operands.begin(), d.operands.end(),
			                       [&](const FormulaPtr &g) { return satisfiable(*g, box, true); });
		    return std::any_of(d.operands.begin(), d.operands.end(),
		                       [&](const FormulaPtr &g) { return satisfiable(*g, box, false); });
	    },
	    [&](const Atom &a) {
		    if (is_object_term(*a.lhs, box) || is_object_term(*a.rhs, box)) {
			    auto l = object_values(*a.lhs, box);
			    auto r = object_values(*a.rhs, box);
			    if (!negated) {
				    for (int x : l)
					    if (std::find(r.begin(), r.end(), x) != r.end())
						    return true;
				    return false;
			    }
			    return !(l.size() == 1 && r.size() == 1 && l[0] == r[0]) && !l.empty() && !r.empty();
		    }
		    Interval d = interval_eval(*a.lhs, box) - interval_eval(*a.rhs, box);
		    if (negated && a.rel == Relation::Eq)
			    return !(d.lo == 0.0 && d.hi == 0.0);
		    switch (negated ? negate(a.rel) : a.rel) {
		    case Relation::Eq: return d.contains(0.0);
		    case Relation::Lt: return d.lo < 0.0;
		    case Relation::Le: return d.lo <= 0.0;
		    case Relation::Gt: return d.hi > 0.0;
		    case Relation::Ge: return d.hi >= 0.0;
		    }
		    return false;
	    },
	}, f.node);
}

} // namespace

std::vector<int> object_values(const Term &term, const IntervalBox &box)
{
	if (const auto *c = std::get_if<ObjectConstant>(&term.node))
		return {c->id};
	std::vector<int> out;
	if (const auto *v = std::get_if<StateVariableRef>(&term.node)) {
		const auto &m = box.members[static_cast<std::size_t>(v->variable)];
		for (std::size_t o = 0; o < m.size(); ++o)
			if (m[o])
				out.push_back(static_cast<int>(o));
	}
	return out;
}

bool interval_satisfiable(const Formula &formula, const IntervalBox &box)
{
	return satisfiable(formula, box, false);
}

} // namespace hyplan
