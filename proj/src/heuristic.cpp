#include "hyplan/heuristic.hpp"

#include <algorithm>
#include <map>

namespace hyplan {

CompiledTask compile_processes(const Task &task, double delta_max)
{
	CompiledTask out;
	out.task = &task;
	out.actions = task.actions;
	out.original_actions = task.actions.size();
	for (const auto &p : task.processes) {
		// several rate effects on one variable inside a process add up
		std::map<int, TermPtr> rate;
		for (const auto &e : p.effects) {
			auto [it, fresh] = rate.emplace(e.target, e.rate);
			if (!fresh)
				it->second = add(it->second, e.rate);
		}
		Action a;
		a.name = p.name;
		a.precondition = p.condition;
		for (const auto &[target, r] : rate)
			a.effects.push_back({target, add(variable(target), mul(constant(delta_max), r))});
		out.actions.push_back(std::move(a));
	}
	return out;
}

RpgResult run_interval_rpg(const CompiledTask &compiled, const State &state, const RpgOptions &options)
{
	const Task &task = *compiled.task;
	RpgResult result;
	IntervalBox box = IntervalBox::from_state(task, state);
	std::vector<bool> applied(compiled.actions.size(), false);

	for (int layer = 0;; ++layer) {
		result.layers = layer + 1;
		if (options.record_layers)
			result.boxes.push_back(box);
		if (interval_satisfiable(*task.goal, box)) {
			result.h = layer;
			return result;
		}
		if (layer == options.max_layers)
			return result;

		IntervalBox next = box;
		std::vector<int> fresh;
		for (std::size_t i = 0; i < compiled.actions.size(); ++i) {
			const Action &a = compiled.actions[i];
			if (!interval_satisfiable(*a.precondition, box))
				continue;
			if (!applied[i]) {
				applied[i] = true;
				++result.distinct_actions;
				fresh.push_back(static_cast<int>(i));
			}
			for (const auto &e : a.effects) {
				auto &members = next.members[static_cast<std::size_t>(e.target)];
				if (!members.empty()) {
					for (int o : object_values(*e.rhs, box))
						members[static_cast<std::size_t>(o)] = true;
					continue;
				}
				Interval v = interval_eval(*e.rhs, box);
				next.lo[e.target] = std::min(next.lo[e.target], v.lo);
				next.hi[e.target] = std::max(next.hi[e.target], v.hi);
			}
		}
		if (options.record_layers)
			result.fresh.push_back(std::move(fresh));
		if (next == box)
			return result;
		box = std::move(next);
	}
}

double h_interval_rpg(const CompiledTask &compiled, const State &state)
{
	return run_interval_rpg(compiled, state).h;
}

} // namespace hyplan
