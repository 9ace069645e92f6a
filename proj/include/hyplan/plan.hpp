#pragma once

#include "hyplan/model.hpp"
#include "hyplan/monitor.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyplan {

struct Happening {
	double time = 0.0;
	std::vector<int> actions; ///< ids into Task::actions, in application order
};

/// A steady interval as the planner produced it.
struct PlanInterval {
	double start = 0.0;
	double end = 0.0;
	std::vector<int> mode;        ///< active process ids
	bool truncated = false;
	std::optional<Origin> origin; ///< crossing that ended the interval early
	std::string atom;             ///< that crossing's atom, printed
};

struct Plan {
	std::vector<Happening> happenings; ///< only non-empty happenings
	double makespan = 0.0;
	std::vector<PlanInterval> intervals;
};

/* Plan text: one line per action, "TIME: (name args)", several lines may
 * share a time and are applied in file order. A closing "TIME: end" line
 * records the makespan; without it the makespan is the last action time.
 * ';' starts a comment. */
std::string format_plan(const Task &task, const Plan &plan);
/// Throws PlanFormatError with the 1-based line number.
Plan parse_plan(const Task &task, std::string_view text);
Plan load_plan(const Task &task, const std::string &path);

/// Fixed three decimals when that reads back within 1e-9, otherwise the
/// shortest round-tripping representation.
std::string format_time(double t);

} // namespace hyplan
