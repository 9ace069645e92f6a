#include "hyplan/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace hyplan {

const char *to_string(Integrator integrator)
{
	switch (integrator) {
	case Integrator::ExplicitEuler: return "euler";
	case Integrator::RK22Midpoint: return "rk2";
	case Integrator::ImplicitEuler: return "ieuler";
	}
	return "?";
}

Integrator parse_integrator(std::string_view name)
{
	if (name == "euler")
		return Integrator::ExplicitEuler;
	if (name == "rk2" || name == "rk22")
		return Integrator::RK22Midpoint;
	if (name == "ieuler")
		return Integrator::ImplicitEuler;
	throw Error(fmt::format("unknown integrator '{}' (expected euler, rk2 or ieuler)", name));
}

bool Mode::affects(int variable) const
{
	auto it = std::lower_bound(rates.begin(), rates.end(), variable,
	                           [](const Rates &r, int v) { return r.variable < v; });
	return it != rates.end() && it->variable == variable;
}

Mode make_mode(const Task &task, std::vector<int> active)
{
	Mode mode;
	mode.active = std::move(active);
	std::map<int, std::vector<TermPtr>> index;
	for (int p : mode.active)
		for (const auto &e : task.processes[static_cast<std::size_t>(p)].effects)
			index[e.target].push_back(e.rate);
	for (auto &[var, terms] : index)
		mode.rates.push_back({var, std::move(terms)});
	mode.affected.resize(static_cast<Eigen::Index>(mode.rates.size()));
	for (std::size_t i = 0; i < mode.rates.size(); ++i)
		mode.affected[static_cast<Eigen::Index>(i)] = mode.rates[i].variable;
	return mode;
}

Mode compute_mode(const Task &task, const State &state)
{
	std::vector<int> active;
	for (std::size_t p = 0; p < task.processes.size(); ++p)
		if (eval_formula(*task.processes[p].condition, state))
			active.push_back(static_cast<int>(p));
	return make_mode(task, std::move(active));
}

Eigen::VectorXd derivative(const Mode &mode, const State &state)
{
	Eigen::VectorXd d(static_cast<Eigen::Index>(mode.rates.size()));
	for (std::size_t i = 0; i < mode.rates.size(); ++i) {
		const auto &terms = mode.rates[i].terms;
		double sum = eval_term(*terms[0], state);
		for (std::size_t k = 1; k < terms.size(); ++k)
			sum += eval_term(*terms[k], state);
		d[static_cast<Eigen::Index>(i)] = sum;
	}
	return d;
}

namespace {

State advanced(const State &base, const Mode &mode, const Eigen::VectorXd &increment, double h)
{
	State next = base;
	next.values(mode.affected) += increment;
	next.clock = base.clock + h;
	return next;
}

} // namespace

Eigen::VectorXd increment_explicit_euler(const State &state, const Mode &mode, double h)
{
	return h * derivative(mode, state);
}

Eigen::VectorXd increment_rk22(const State &state, const Mode &mode, double h)
{
	State half = advanced(state, mode, 0.5 * h * derivative(mode, state), 0.5 * h);
	return h * derivative(mode, half);
}

Eigen::VectorXd increment_implicit_euler(const State &state, const Mode &mode, double h, double epsilon,
                                         int max_iters)
{
	Eigen::VectorXd inc = increment_explicit_euler(state, mode, h);
	if (mode.empty())
		return inc;
	for (int it = 0; it < max_iters; ++it) {
		Eigen::VectorXd next = h * derivative(mode, advanced(state, mode, inc, h));
		double change = (next - inc).cwiseAbs().maxCoeff();
		if (!std::isfinite(change))
			throw IntegrationFailure(0, "implicit Euler iteration produced a non-finite value");
		inc = std::move(next);
		if (change < epsilon)
			return inc;
	}
	throw IntegrationFailure(0, fmt::format("implicit Euler did not converge in {} iterations", max_iters));
}

Eigen::VectorXd increment(const IntegratorSettings &settings, const State &state, const Mode &mode, double h)
{
	switch (settings.kind) {
	case Integrator::ExplicitEuler: return increment_explicit_euler(state, mode, h);
	case Integrator::RK22Midpoint: return increment_rk22(state, mode, h);
	case Integrator::ImplicitEuler:
		return increment_implicit_euler(state, mode, h, settings.epsilon, settings.max_iters);
	}
	throw Error("unknown integrator");
}

State step_explicit_euler(const State &state, const Mode &mode, double h)
{
	return advanced(state, mode, increment_explicit_euler(state, mode, h), h);
}

State step_rk22(const State &state, const Mode &mode, double h)
{
	return advanced(state, mode, increment_rk22(state, mode, h), h);
}

State step_implicit_euler(const State &state, const Mode &mode, double h, double epsilon, int max_iters)
{
	return advanced(state, mode, increment_implicit_euler(state, mode, h, epsilon, max_iters), h);
}

State step(const IntegratorSettings &settings, const State &state, const Mode &mode, double h)
{
	return advanced(state, mode, increment(settings, state, mode, h), h);
}

Stepper::Stepper(const IntegratorSettings &settings, const Mode &mode)
    : settings_(settings), mode_(mode), carry_(Eigen::VectorXd::Zero(mode.affected.size()))
{
}

State Stepper::advance(const State &state, double h)
{
	// Kahan summation: carry_ holds the low-order part lost by the last add
	Eigen::VectorXd y = increment(settings_, state, mode_, h) - carry_;
	State next = state;
	next.values(mode_.affected) += y;
	carry_ = (next.values(mode_.affected) - state.values(mode_.affected)) - y;
	next.clock = state.clock + h;
	return next;
}

double StepSchedule::offset(long i, double duration) const
{
	if (i >= count())
		return duration;
	return static_cast<double>(i) * step;
}

StepSchedule decompose(double duration, double dz)
{
	StepSchedule s;
	s.step = dz;
	// a ratio within rounding noise of an integer k means k equal steps
	// (0.1 * 0.1 is not 0.01, yet 1.0 should still take 100 steps)
	const double ratio = duration / dz;
	const double nearest = std::round(ratio);
	if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) {
		s.full_steps = static_cast<long>(nearest);
		s.step = duration / nearest;
		return s;
	}
	s.full_steps = static_cast<long>(std::floor(duration / dz));
	// floor(d / dz) can overshoot by one ulp-induced step
	while (s.full_steps > 0 && static_cast<double>(s.full_steps) * dz > duration)
		--s.full_steps;
	double rest = duration - static_cast<double>(s.full_steps) * dz;
	s.remainder = rest > 1e-12 * dz ? rest : 0.0;
	return s;
}

std::vector<State> integrate_interval(const State &state, const Mode &mode, double duration, double dz,
                                      const IntegratorSettings &settings)
{
	StepSchedule schedule = decompose(duration, dz);
	std::vector<State> trace;
	trace.reserve(static_cast<std::size_t>(schedule.count()));
	const double start = state.clock;
	const State *current = &state;
	Stepper stepper(settings, mode);
	for (long i = 0; i < schedule.count(); ++i) {
		double h = i < schedule.full_steps ? schedule.step : schedule.remainder;
		try {
			trace.push_back(stepper.advance(*current, h));
		} catch (const IntegrationFailure &e) {
			throw IntegrationFailure(static_cast<int>(i), e.what());
		} catch (const EvaluationError &e) {
			throw IntegrationFailure(static_cast<int>(i), fmt::format("step {}: {}", i, e.what()));
		}
		trace.back().clock = i + 1 == schedule.count() ? start + duration : start + schedule.offset(i + 1, duration);
		current = &trace.back();
	}
	return trace;
}

IntegratorSettings integrator_settings(const SimConfig &config, Integrator kind)
{
	return {kind, config.fixpoint_epsilon, config.max_fixpoint_iters};
}

std::vector<State> integrate_interval(const Task &task, const State &state, const Mode &mode, double duration,
                                      Integrator integrator)
{
	return integrate_interval(state, mode, duration, task.config.delta_z,
	                          integrator_settings(task.config, integrator));
}

} // namespace hyplan
