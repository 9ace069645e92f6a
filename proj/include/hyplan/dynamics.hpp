#pragma once

#include "hyplan/model.hpp"

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace hyplan {

enum class Integrator { ExplicitEuler, RK22Midpoint, ImplicitEuler };

const char *to_string(Integrator integrator);
/// Accepts "euler", "rk2", "ieuler".
Integrator parse_integrator(std::string_view name);

/// The active processes of an interval together with the rate terms that
/// drive each affected variable. Rates of several processes on one variable
/// superimpose (their values are summed).
struct Mode {
	struct Rates {
		int variable;
		std::vector<TermPtr> terms;
	};

	std::vector<int> active;      ///< process ids, declaration order
	std::vector<Rates> rates;     ///< sorted by variable id
	Eigen::VectorXi affected;     ///< rates[i].variable, as an index vector

	bool empty() const { return rates.empty(); }
	bool affects(int variable) const;
};

Mode compute_mode(const Task &task, const State &state);

/// Builds a mode from an explicit set of active processes.
Mode make_mode(const Task &task, std::vector<int> active);

/// d/dt of every affected variable, all rates read from one snapshot.
Eigen::VectorXd derivative(const Mode &mode, const State &state);

struct IntegratorSettings {
	Integrator kind = Integrator::RK22Midpoint;
	double epsilon = 1e-6;
	int max_iters = 100;
};

State step_explicit_euler(const State &state, const Mode &mode, double h);
State step_rk22(const State &state, const Mode &mode, double h);
/// Fixed-point iteration seeded with the explicit Euler step; throws
/// IntegrationFailure when it does not converge within max_iters.
State step_implicit_euler(const State &state, const Mode &mode, double h, double epsilon, int max_iters);
State step(const IntegratorSettings &settings, const State &state, const Mode &mode, double h);

/// The change of the affected variables over one step (indexed like
/// Mode::affected).
Eigen::VectorXd increment_explicit_euler(const State &state, const Mode &mode, double h);
Eigen::VectorXd increment_rk22(const State &state, const Mode &mode, double h);
Eigen::VectorXd increment_implicit_euler(const State &state, const Mode &mode, double h, double epsilon,
                                         int max_iters);
Eigen::VectorXd increment(const IntegratorSettings &settings, const State &state, const Mode &mode, double h);

/// Steps one mode through a sequence of states with compensated summation,
/// so a long run of small steps accumulates no more rounding than a single
/// addition. Used by every multi-step loop.
class Stepper {
public:
	Stepper(const IntegratorSettings &settings, const Mode &mode);
	State advance(const State &state, double h);

private:
	IntegratorSettings settings_;
	const Mode &mode_;
	Eigen::VectorXd carry_;
};

/// k full steps of size `step` and a remainder step when one is left.
struct StepSchedule {
	long full_steps = 0;
	double step = 0.0;
	double remainder = 0.0;

	long count() const { return full_steps + (remainder > 0.0 ? 1 : 0); }
	/// Offset from the interval start after `i` steps (the last one is exact).
	double offset(long i, double duration) const;
};

/// k = floor(duration / step) full steps plus a remainder step. When
/// duration / step is within 1e-9 relative of an integer k, the interval is
/// split into k equal steps instead; remainders below 1e-12 * step are dropped.
StepSchedule decompose(double duration, double step);

/// Post-step states of every step; the final clock is start + duration.
std::vector<State> integrate_interval(const State &state, const Mode &mode, double duration, double dz,
                                      const IntegratorSettings &settings);
std::vector<State> integrate_interval(const Task &task, const State &state, const Mode &mode, double duration,
                                      Integrator integrator);

IntegratorSettings integrator_settings(const SimConfig &config, Integrator kind);

} // namespace hyplan
