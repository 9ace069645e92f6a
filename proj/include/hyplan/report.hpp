#pragma once

#include "hyplan/search.hpp"
#include "hyplan/validate.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hyplan {

inline constexpr int kSchemaVersion = 1;

/// Collects the states of a trajectory, keeping the last one per clock value.
class Trace {
public:
	void record(const State &s);
	GridObserver observer()
	{
		return [this](const State &s) { record(s); };
	}
	const std::vector<State> &states() const { return states_; }

private:
	std::vector<State> states_;
};

/// "x" for "(x)", "pos car1" for "(pos car1)".
std::string column_name(const StateVariable &v);

/// Variable by its column name or ground name.
std::optional<int> lookup_variable(const Task &task, std::string_view name);

/// Header `t,<real variables>`, one row per distinct time.
void write_csv(std::ostream &out, const Task &task, const std::vector<State> &states);

/// Trajectory of two variables: polyline, a circle at the first state and the
/// goal box when the goal bounds both variables from both sides.
void write_svg(std::ostream &out, const Task &task, const std::vector<State> &states, int x_var, int y_var);

nlohmann::json config_json(const SimConfig &config);
nlohmann::json plan_json(const Task &task, const SearchOptions &options, const SearchResult &result);
nlohmann::json validation_json(const Task &task, const ValidationReport &report);

} // namespace hyplan
