#pragma once

#include "hyplan/expr.hpp"
#include "hyplan/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace hyplan {

/// Results are clamped to [-kIntervalClamp, kIntervalClamp].
inline constexpr double kIntervalClamp = 1e18;

struct Interval {
	double lo = 0.0;
	double hi = 0.0;

	static Interval point(double v) { return {v, v}; }
	static Interval whole() { return {-kIntervalClamp, kIntervalClamp}; }
	bool contains(double v) const { return lo <= v && v <= hi; }
	friend bool operator==(const Interval &, const Interval &) = default;
};

Interval hull(Interval a, Interval b);

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator-(Interval a);
/// Naive product: hull of the four endpoint products.
Interval operator*(Interval a, Interval b);
Interval operator/(Interval a, Interval b);
Interval ipow(Interval base, Interval exponent);
Interval iroot(Interval radicand, Interval degree);
Interval isin(Interval x);
Interval icos(Interval x);
Interval itan(Interval x);

/// Relaxed state: an interval per numeric variable and a value set per
/// object-typed variable.
struct IntervalBox {
	Eigen::ArrayXd lo;
	Eigen::ArrayXd hi;
	/// members[v][o] is true when object o is a possible value of v; empty
	/// for numeric variables.
	std::vector<std::vector<bool>> members;

	static IntervalBox from_state(const Task &task, const State &state);

	Interval interval(int v) const { return {lo[v], hi[v]}; }
	bool contains(const IntervalBox &inner) const;
	friend bool operator==(const IntervalBox &a, const IntervalBox &b)
	{
		return (a.lo == b.lo).all() && (a.hi == b.hi).all() && a.members == b.members;
	}
};

Interval interval_eval(const Term &term, const IntervalBox &box);

/// Possible object values of an object-typed term.
std::vector<int> object_values(const Term &term, const IntervalBox &box);

/// Optimistic truth: conjunctions need each conjunct satisfiable on its own,
/// disjunctions need one disjunct.
bool interval_satisfiable(const Formula &formula, const IntervalBox &box);

} // namespace hyplan
