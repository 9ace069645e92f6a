#include "hyplan/search.hpp"

#include <fmt/format.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <queue>
#include <unordered_set>

namespace hyplan {

const char *to_string(Algorithm algorithm)
{
	return algorithm == Algorithm::Bfs ? "bfs" : "gbfs";
}

Algorithm parse_algorithm(std::string_view name)
{
	if (name == "bfs")
		return Algorithm::Bfs;
	if (name == "gbfs")
		return Algorithm::Gbfs;
	throw Error(fmt::format("unknown search algorithm '{}' (expected bfs or gbfs)", name));
}

const char *to_string(SearchStatus status)
{
	switch (status) {
	case SearchStatus::Solved: return "solved";
	case SearchStatus::Unsolvable: return "unsolvable";
	case SearchStatus::NodeCapReached: return "node-cap";
	case SearchStatus::TimeCapReached: return "time-cap";
	}
	return "?";
}

Simulator::Simulator(const Task &task, const SearchOptions &options)
    : task_(task), options_(options)
{
}

SimOutcome Simulator::sim(const State &state, double duration, const GridObserver &observer) const
{
	SimOutcome out;
	Mode mode;
	try {
		mode = compute_mode(task_, state);
	} catch (const EvaluationError &) {
		return out;
	}
	out.label.mode = mode.active;
	if (mode.empty())
		return out;
	const MonitorSettings settings = monitor_settings(task_.config, options_.integrator);

	if (!options_.zero_crossing) {
		std::vector<State> trace;
		try {
			trace = integrate_interval(state, mode, duration, settings.delta_z, settings.integrator);
			if (trace.empty() || first_violated_clause(task_, trace.back()) >= 0)
				return out;
		} catch (const Error &) {
			return out;
		}
		if (observer) {
			observer(state);
			for (const auto &s : trace)
				observer(s);
		}
		out.label.duration = trace.back().clock - state.clock;
		out.successor = std::move(trace.back());
		return out;
	}

	try {
		InvariantOptions inv_options;
		inv_options.include_goal = !eval_formula(*task_.goal, state);
		out.invariant = build_invariant(task_, mode, state, inv_options);
		out.report = detect_crossing(out.invariant, state, mode, duration, settings, observer);
	} catch (const Error &) {
		return out;
	}
	CrossingReport &report = *out.report;
	if (!report.crossed) {
		out.successor = report.truncated_state;
	} else {
		out.label.truncated = true;
		out.label.origin = report.origin;
		const auto &a = out.invariant.atoms[static_cast<std::size_t>(report.atom)].atom;
		out.label.atom = task_.describe(*hyplan::atom(a.lhs, a.rel, a.rhs));
		// Leaving one disjunct of a clause while another still holds is a
		// switch, not a violation: the wait may end past it.
		bool land_past = true;
		try {
			land_past = first_violated_clause(task_, report.crossing_state) < 0;
		} catch (const EvaluationError &) {
			land_past = false;
		}
		if (land_past)
			out.successor = report.crossing_state;
		else if (report.truncation_time > state.clock)
			out.successor = report.truncated_state;
		else
			return out;
	}
	out.label.duration = out.successor->clock - state.clock;
	return out;
}

namespace {

struct Node {
	State state;
	int parent = -1;
	Label label;
	int consecutive = 0; ///< actions applied since the last wait
};

struct KeyHash {
	std::size_t operator()(const std::vector<long long> &key) const
	{
		std::size_t h = key.size();
		for (long long v : key)
			h ^= std::hash<long long>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
		return h;
	}
};

class Search {
public:
	Search(const Task &task, const SearchOptions &options)
	    : task_(task), options_(options), simulator_(task, options), compiled_(compile_processes(task))
	{
	}

	SearchResult run()
	{
		const auto started = std::chrono::steady_clock::now();
		auto elapsed = [&] {
			return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
		};
		SearchResult result;
		auto finish = [&](SearchStatus status, int goal_node) {
			result.status = status;
			if (goal_node >= 0)
				solution(goal_node, result);
			result.stats = stats_;
			result.stats.runtime_seconds = elapsed();
			return result;
		};

		nodes_.push_back({task_.initial, -1, SimLabel{}, 0});
		if (gbfs()) {
			RpgResult rpg = run_interval_rpg(compiled_, task_.initial);
			++stats_.evaluations;
			stats_.initial_h = rpg.h;
			stats_.initial_distinct_actions = rpg.distinct_actions;
			if (std::isinf(rpg.h))
				return finish(SearchStatus::Unsolvable, -1);
		}
		remember(task_.initial);
		push(0, stats_.initial_h);

		while (!empty()) {
			if (stats_.expansions >= options_.node_cap)
				return finish(SearchStatus::NodeCapReached, -1);
			if ((stats_.expansions & 255) == 0 && elapsed() > options_.time_cap_seconds)
				return finish(SearchStatus::TimeCapReached, -1);
			const int id = pop();
			if (goal(nodes_[static_cast<std::size_t>(id)].state))
				return finish(SearchStatus::Solved, id);
			++stats_.expansions;

			bool any = false;
			for (auto &[label, state] : expand(id)) {
				++stats_.generations;
				if (!remember(state)) {
					++stats_.duplicates;
					continue;
				}
				double h = 0.0;
				if (gbfs()) {
					h = h_interval_rpg(compiled_, state);
					++stats_.evaluations;
					if (std::isinf(h)) {
						++stats_.dead_ends;
						continue;
					}
				}
				const Node &parent = nodes_[static_cast<std::size_t>(id)];
				int consecutive = std::holds_alternative<int>(label) ? parent.consecutive + 1 : 0;
				bool goal_crossing = false;
				if (const auto *sim = std::get_if<SimLabel>(&label))
					goal_crossing = sim->origin == Origin::GoalNegation;
				nodes_.push_back({std::move(state), id, std::move(label), consecutive});
				const int child = static_cast<int>(nodes_.size()) - 1;
				any = true;
				if (goal_crossing && goal(nodes_.back().state))
					return finish(SearchStatus::Solved, child);
				push(child, h);
			}
			if (!any)
				++stats_.dead_ends;
		}
		return finish(SearchStatus::Unsolvable, -1);
	}

private:
	bool gbfs() const { return options_.algorithm == Algorithm::Gbfs; }

	bool goal(const State &s) const
	{
		try {
			return eval_formula(*task_.goal, s);
		} catch (const EvaluationError &) {
			return false;
		}
	}

	std::vector<std::pair<Label, State>> expand(int id)
	{
		std::vector<std::pair<Label, State>> out;
		const Node &node = nodes_[static_cast<std::size_t>(id)];
		if (node.consecutive < options_.max_consecutive_actions) {
			for (std::size_t a = 0; a < task_.actions.size(); ++a) {
				auto next = try_apply_action(task_, node.state, task_.actions[a]);
				if (next && !seen_in_happening(id, *next))
					out.emplace_back(static_cast<int>(a), std::move(*next));
			}
		}
		++stats_.sims;
		SimOutcome sim = simulator_.sim(node.state);
		if (sim.report && sim.report->crossed)
			++stats_.crossings;
		if (sim.successor)
			out.emplace_back(std::move(sim.label), std::move(*sim.successor));
		else
			++stats_.sims_pruned;
		return out;
	}

	/// Whether `s` equals a state reached earlier in the same happening
	/// (action loops such as toggling a switch back and forth).
	bool seen_in_happening(int id, const State &s) const
	{
		for (int n = id; n >= 0;) {
			const Node &node = nodes_[static_cast<std::size_t>(n)];
			if (bitwise_equal(node.state, s))
				return true;
			if (!std::holds_alternative<int>(node.label))
				break;
			n = node.parent;
		}
		return false;
	}

	/// False when duplicate detection is on and `s` was seen before.
	bool remember(const State &s)
	{
		if (!options_.quantize)
			return true;
		const double q = *options_.quantize;
		std::vector<long long> key(static_cast<std::size_t>(s.size()));
		for (int v = 0; v < s.size(); ++v) {
			if (task_.variables[static_cast<std::size_t>(v)].type.kind == ValueKind::Real)
				key[static_cast<std::size_t>(v)] = std::llround(s[v] / q);
			else
				key[static_cast<std::size_t>(v)] = std::bit_cast<long long>(s[v]);
		}
		return seen_.insert(std::move(key)).second;
	}

	void push(int id, double h)
	{
		if (gbfs())
			open_.push({h, sequence_++, id});
		else
			fifo_.push_back(id);
	}

	bool empty() const { return gbfs() ? open_.empty() : fifo_.empty(); }

	int pop()
	{
		if (gbfs()) {
			int id = open_.top().id;
			open_.pop();
			return id;
		}
		int id = fifo_.front();
		fifo_.pop_front();
		return id;
	}

	void solution(int goal_node, SearchResult &result) const
	{
		std::vector<int> chain;
		for (int n = goal_node; n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent)
			chain.push_back(n);
		std::vector<double> clocks;
		for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
			const Node &node = nodes_[static_cast<std::size_t>(*it)];
			clocks.push_back(node.state.clock);
			if (node.parent >= 0)
				result.path.push_back(node.label);
		}
		result.goal_state = nodes_[static_cast<std::size_t>(goal_node)].state;
		result.plan = extract_plan(result.path, clocks, task_.config.delta_max);
	}

	struct Entry {
		double h;
		long sequence;
		int id;
		bool operator>(const Entry &o) const { return h != o.h ? h > o.h : sequence > o.sequence; }
	};

	const Task &task_;
	SearchOptions options_;
	Simulator simulator_;
	CompiledTask compiled_;
	std::vector<Node> nodes_;
	std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open_;
	std::deque<int> fifo_;
	long sequence_ = 0;
	std::unordered_set<std::vector<long long>, KeyHash> seen_;
	SearchStats stats_;
};

} // namespace

SearchResult search(const Task &task, const SearchOptions &options)
{
	return Search(task, options).run();
}

Plan extract_plan(const std::vector<Label> &path, const std::vector<double> &clocks, double delta_max)
{
	if (clocks.size() != path.size() + 1)
		throw InternalInconsistency("path and clock list lengths disagree");
	Plan plan;
	Happening current{clocks.front(), {}};
	for (std::size_t i = 0; i < path.size(); ++i) {
		const double before = clocks[i];
		const double after = clocks[i + 1];
		if (const int *action = std::get_if<int>(&path[i])) {
			if (after != before)
				throw InternalInconsistency(fmt::format("action at step {} changed the clock", i));
			if (current.actions.empty())
				current.time = before;
			current.actions.push_back(*action);
			continue;
		}
		const auto &sim = std::get<SimLabel>(path[i]);
		if (!(after > before) || after - before > delta_max * (1.0 + 1e-9))
			throw InternalInconsistency(
			    fmt::format("wait at step {} spans {} with a limit of {}", i, after - before, delta_max));
		if (!plan.intervals.empty() && plan.intervals.back().end != before)
			throw InternalInconsistency(fmt::format("interval at step {} does not start where the last ended", i));
		if (!current.actions.empty()) {
			if (!plan.happenings.empty() && plan.happenings.back().time > current.time)
				throw InternalInconsistency("happening times decrease");
			plan.happenings.push_back(std::move(current));
		}
		current = {after, {}};
		plan.intervals.push_back({before, after, sim.mode, sim.truncated, sim.origin, sim.atom});
	}
	if (!current.actions.empty())
		plan.happenings.push_back(std::move(current));
	plan.makespan = clocks.back() - clocks.front();
	return plan;
}

State replay_path(const Task &task, const SearchOptions &options, const std::vector<Label> &path,
                  const GridObserver &observer)
{
	Simulator simulator(task, options);
	State s = task.initial;
	if (observer)
		observer(s);
	for (std::size_t i = 0; i < path.size(); ++i) {
		if (const int *action = std::get_if<int>(&path[i])) {
			auto next = try_apply_action(task, s, task.actions[static_cast<std::size_t>(*action)]);
			if (!next)
				throw InternalInconsistency(fmt::format("replayed action at step {} is not applicable", i));
			s = std::move(*next);
		} else {
			SimOutcome out = simulator.sim(s, task.config.delta_max, observer);
			if (!out.successor)
				throw InternalInconsistency(fmt::format("replayed wait at step {} was pruned", i));
			s = std::move(*out.successor);
		}
		if (observer)
			observer(s);
	}
	return s;
}

} // namespace hyplan
