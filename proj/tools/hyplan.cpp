// hyplan: plan, validate and simulate hybrid tasks.
//
// Exit codes: 0 ok, 2 parse or usage error, 3 unsolvable or out of budget,
// 4 internal error, 5 plan invalid.

#include "hyplan/parser.hpp"
#include "hyplan/report.hpp"
#include "hyplan/search.hpp"
#include "hyplan/validate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>

using namespace hyplan;

namespace {

enum Exit { kOk = 0, kUsage = 2, kNoPlan = 3, kInternal = 4, kInvalid = 5 };

class UsageError : public Error {
public:
	using Error::Error;
};

struct StepFlags {
	std::optional<double> delta_max;
	std::optional<double> delta_min;
	std::optional<double> delta_z;
	std::optional<double> delta_h_factor;
	std::optional<double> epsilon;
	std::string integrator;
};

struct OutputFlags {
	std::string json;
	std::string trace;
	std::string svg;
	std::string plot_x;
	std::string plot_y;
};

void add_step_flags(CLI::App *cmd, StepFlags &f, bool needs_delta_max)
{
	cmd->add_option("--delta-max", f.delta_max,
	                needs_delta_max ? "Planning step (required unless the problem declares :bounds)"
	                                : "Planning step");
	cmd->add_option("--delta-min", f.delta_min, "Smallest planner-chosen wait (default 0)");
	cmd->add_option("--delta-z", f.delta_z, "Integration step (default delta-max/10)");
	cmd->add_option("--delta-h-factor", f.delta_h_factor, "Monitoring step as a fraction of delta-z (default 0.1)");
	cmd->add_option("--epsilon", f.epsilon, "Implicit Euler fixed-point tolerance (default 1e-6)");
}

void add_output_flags(CLI::App *cmd, OutputFlags &o)
{
	cmd->add_option("--json", o.json, "Write a JSON report");
	cmd->add_option("--trace", o.trace, "Write the trajectory as CSV");
	cmd->add_option("--svg", o.svg, "Write a 2-D trajectory plot");
	cmd->add_option("--plot-x", o.plot_x, "Horizontal variable of the plot");
	cmd->add_option("--plot-y", o.plot_y, "Vertical variable of the plot");
}

void configure(Task &task, const StepFlags &f, bool needs_delta_max)
{
	SimConfig &c = task.config;
	if (f.delta_max) {
		c.delta_max = *f.delta_max;
		c.delta_z = *f.delta_max / 10.0;
	} else if (needs_delta_max && !task.declared_delta_max) {
		throw UsageError("--delta-max is required (the problem declares no :delta-max bound)");
	}
	if (f.delta_z)
		c.delta_z = *f.delta_z;
	if (f.delta_min)
		c.delta_min = *f.delta_min;
	if (f.delta_h_factor)
		c.delta_h_factor = *f.delta_h_factor;
	if (f.epsilon)
		c.fixpoint_epsilon = *f.epsilon;
	try {
		c.check();
	} catch (const ModelError &e) {
		throw UsageError(e.what());
	}
}

std::ofstream open_output(const std::string &path)
{
	std::ofstream out(path);
	if (!out)
		throw UsageError(fmt::format("{}: cannot write", path));
	return out;
}

void write_json(const std::string &path, const nlohmann::json &j)
{
	if (path.empty())
		return;
	open_output(path) << j.dump(2) << '\n';
}

void write_artifacts(const Task &task, const OutputFlags &o, const std::vector<State> &states)
{
	if (!o.trace.empty()) {
		auto out = open_output(o.trace);
		write_csv(out, task, states);
	}
	if (!o.svg.empty()) {
		auto pick = [&](const std::string &name, int fallback) {
			if (name.empty()) {
				std::vector<int> reals;
				for (std::size_t v = 0; v < task.variables.size(); ++v)
					if (task.variables[v].type.kind == ValueKind::Real)
						reals.push_back(static_cast<int>(v));
				if (reals.empty())
					throw UsageError("--svg needs a real-valued variable");
				return reals[std::min(static_cast<std::size_t>(fallback), reals.size() - 1)];
			}
			auto v = lookup_variable(task, name);
			if (!v)
				throw UsageError(fmt::format("unknown plot variable '{}'", name));
			return *v;
		};
		int x = pick(o.plot_x, 0);
		int y = pick(o.plot_y, 1);
		auto out = open_output(o.svg);
		write_svg(out, task, states, x, y);
	}
}

bool wants_trajectory(const OutputFlags &o)
{
	return !o.trace.empty() || !o.svg.empty();
}

struct PlanFlags {
	std::string domain, problem;
	StepFlags steps;
	OutputFlags outputs;
	std::string search = "gbfs";
	std::optional<double> quantize;
	long node_cap = 10'000'000;
	double time_cap = 1800.0;
	int max_actions = 64;
	bool no_zcc = false;
	std::string out;
};

int cmd_plan(const PlanFlags &f)
{
	Task task = load_task(f.domain, f.problem);
	configure(task, f.steps, true);
	SearchOptions options;
	options.algorithm = parse_algorithm(f.search);
	options.integrator = parse_integrator(f.steps.integrator.empty() ? "rk2" : f.steps.integrator);
	options.zero_crossing = !f.no_zcc;
	options.quantize = f.quantize;
	options.node_cap = f.node_cap;
	options.time_cap_seconds = f.time_cap;
	options.max_consecutive_actions = f.max_actions;

	SearchResult result = search(task, options);
	write_json(f.outputs.json, plan_json(task, options, result));
	fmt::print(stderr, "; {} after {} expansions, {} generations, {:.3f} s\n", to_string(result.status),
	           result.stats.expansions, result.stats.generations, result.stats.runtime_seconds);
	if (!result.plan)
		return kNoPlan;

	Trace trace;
	State replayed = replay_path(task, options, result.path, wants_trajectory(f.outputs) ? trace.observer() : GridObserver{});
	if (!bitwise_equal(replayed, result.goal_state))
		throw InternalInconsistency("replaying the plan did not reproduce the goal state");
	write_artifacts(task, f.outputs, trace.states());

	std::string text = format_plan(task, *result.plan);
	if (f.out.empty())
		std::cout << text;
	else
		open_output(f.out) << text;
	fmt::print(stderr, "; makespan {}\n", format_time(result.plan->makespan));
	return kOk;
}

struct ValidateFlags {
	std::string domain, problem, plan;
	StepFlags steps;
	OutputFlags outputs;
	double dz = 0.001;
};

int cmd_validate(const ValidateFlags &f)
{
	Task task = load_task(f.domain, f.problem);
	configure(task, f.steps, false);
	Plan plan = load_plan(task, f.plan);
	ValidationSettings settings;
	settings.integrator = parse_integrator(f.steps.integrator.empty() ? "ieuler" : f.steps.integrator);
	settings.delta_z = f.dz;
	settings.delta_h_factor = task.config.delta_h_factor;
	settings.epsilon = task.config.fixpoint_epsilon;
	if (!(settings.delta_z > 0.0))
		throw UsageError("--dz must be positive");

	Trace trace;
	ValidationReport report =
	    validate_plan(task, plan, settings, wants_trajectory(f.outputs) ? trace.observer() : GridObserver{});
	write_json(f.outputs.json, validation_json(task, report));
	write_artifacts(task, f.outputs, trace.states());
	if (report.valid) {
		fmt::print("VALID makespan {}\n", format_time(report.makespan));
		return kOk;
	}
	const Violation &v = *report.violation;
	fmt::print("INVALID at t={} {}{}{}\n", v.time, v.cause, v.atom.empty() ? "" : ": ", v.atom);
	return kInvalid;
}

struct SimulateFlags {
	std::string domain, problem;
	StepFlags steps;
	OutputFlags outputs;
	double horizon = 0.0;
	bool no_zcc = false;
};

nlohmann::json crossing_json(const Task &task, const SimOutcome &out)
{
	const CrossingReport &r = *out.report;
	const Atom &a = out.invariant.atoms[static_cast<std::size_t>(r.atom)].atom;
	return {{"time", r.truncation_time},
	        {"crossing_time", r.crossing_time},
	        {"origin", to_string(*r.origin)},
	        {"atom", task.describe(*atom(a.lhs, a.rel, a.rhs))}};
}

int cmd_simulate(const SimulateFlags &f)
{
	Task task = load_task(f.domain, f.problem);
	configure(task, f.steps, true);
	if (!(f.horizon >= 0.0))
		throw UsageError("--horizon must be non-negative");
	SearchOptions options;
	options.integrator = parse_integrator(f.steps.integrator.empty() ? "rk2" : f.steps.integrator);
	options.zero_crossing = !f.no_zcc;
	Simulator simulator(task, options);

	Trace trace;
	State s = task.initial;
	trace.record(s);
	std::string stop = "horizon";
	nlohmann::json intervals = nlohmann::json::array();
	nlohmann::json crossing = nullptr;
	while (f.horizon - s.clock > 1e-12 * std::max(1.0, f.horizon)) {
		SimOutcome out = simulator.sim(s, std::min(task.config.delta_max, f.horizon - s.clock), trace.observer());
		if (!out.successor) {
			stop = out.label.mode.empty() ? "empty-mode" : "pruned";
			if (out.report && out.report->crossed)
				crossing = crossing_json(task, out);
			break;
		}
		intervals.push_back({{"start", s.clock}, {"end", out.successor->clock}});
		s = std::move(*out.successor);
		trace.record(s);
		if (out.label.origin) {
			stop = "crossing";
			crossing = crossing_json(task, out);
			break;
		}
	}
	nlohmann::json j = {
	    {"schema_version", kSchemaVersion},
	    {"domain", task.domain_name},
	    {"problem", task.problem_name},
	    {"stop", stop},
	    {"final_time", s.clock},
	    {"config", config_json(task.config)},
	    {"intervals", intervals},
	    {"crossing", crossing},
	};
	j["config"]["integrator"] = to_string(options.integrator);
	write_json(f.outputs.json, j);
	write_artifacts(task, f.outputs, trace.states());
	fmt::print("{} at t={}\n", stop, s.clock);
	return kOk;
}

} // namespace

int main(int argc, char **argv)
{
	const CLI::IsMember kIntegrators({"euler", "rk2", "rk22", "ieuler"});
	CLI::App app{"Planner and validator for hybrid tasks with processes"};
	app.require_subcommand(1);

	PlanFlags plan;
	auto *p = app.add_subcommand("plan", "Search for a plan");
	p->add_option("domain", plan.domain)->required();
	p->add_option("problem", plan.problem)->required();
	add_step_flags(p, plan.steps, true);
	p->add_option("--integrator", plan.steps.integrator, "euler, rk2 or ieuler (default rk2)")
	    ->check(kIntegrators);
	p->add_option("--search", plan.search, "bfs or gbfs (default gbfs)")->check(CLI::IsMember({"bfs", "gbfs"}));
	p->add_option("--quantize", plan.quantize, "Duplicate detection quantum (off by default)");
	p->add_option("--node-cap", plan.node_cap, "Expansion limit (default 1e7)");
	p->add_option("--time-cap-seconds", plan.time_cap, "Wall-clock limit (default 1800)");
	p->add_option("--max-actions-per-happening", plan.max_actions, "Consecutive action limit (default 64)");
	p->add_flag("--no-zcc", plan.no_zcc, "Run every wait for the full delta-max; check only its end state");
	p->add_option("--out", plan.out, "Write the plan here instead of stdout");
	add_output_flags(p, plan.outputs);

	ValidateFlags val;
	auto *v = app.add_subcommand("validate", "Re-execute a plan with a fine step");
	v->add_option("domain", val.domain)->required();
	v->add_option("problem", val.problem)->required();
	v->add_option("plan", val.plan)->required();
	add_step_flags(v, val.steps, false);
	v->add_option("--integrator", val.steps.integrator, "euler, rk2 or ieuler (default ieuler)")
	    ->check(kIntegrators);
	v->add_option("--dz", val.dz, "Integration step (default 0.001)");
	add_output_flags(v, val.outputs);

	SimulateFlags sim;
	auto *s = app.add_subcommand("simulate", "Let the initial state evolve without actions");
	s->add_option("domain", sim.domain)->required();
	s->add_option("problem", sim.problem)->required();
	s->add_option("--horizon", sim.horizon, "Time to simulate")->required();
	add_step_flags(s, sim.steps, true);
	s->add_option("--integrator", sim.steps.integrator, "euler, rk2 or ieuler (default rk2)")
	    ->check(kIntegrators);
	s->add_flag("--no-zcc", sim.no_zcc, "Do not stop at crossings");
	add_output_flags(s, sim.outputs);

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForAllHelp &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return kUsage;
	}

	try {
		if (p->parsed())
			return cmd_plan(plan);
		if (v->parsed())
			return cmd_validate(val);
		return cmd_simulate(sim);
	} catch (const ParseError &e) {
		fmt::print(stderr, "error: {}\n", e.what());
		return kUsage;
	} catch (const PlanFormatError &e) {
		fmt::print(stderr, "error: {}\n", e.what());
		return kUsage;
	} catch (const UsageError &e) {
		fmt::print(stderr, "error: {}\n", e.what());
		return kUsage;
	} catch (const std::exception &e) {
		fmt::print(stderr, "internal error: {}\n", e.what());
		return kInternal;
	}
}
