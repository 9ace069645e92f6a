#include "hyplan/plan.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hyplan {

std::string format_time(double t)
{
	std::string fixed = fmt::format("{:.3f}", t);
	if (std::abs(std::strtod(fixed.c_str(), nullptr) - t) <= 1e-9)
		return fixed;
	return fmt::format("{}", t);
}

std::string format_plan(const Task &task, const Plan &plan)
{
	std::string out;
	for (const auto &h : plan.happenings)
		for (int a : h.actions)
			out += fmt::format("{}: ({})\n", format_time(h.time), task.actions[static_cast<std::size_t>(a)].name);
	out += fmt::format("{}: end\n", format_time(plan.makespan));
	return out;
}

namespace {

std::string_view trim(std::string_view s)
{
	auto first = s.find_first_not_of(" \t\r");
	if (first == std::string_view::npos)
		return {};
	auto last = s.find_last_not_of(" \t\r");
	return s.substr(first, last - first + 1);
}

} // namespace

Plan parse_plan(const Task &task, std::string_view text)
{
	Plan plan;
	bool ended = false;
	int line_no = 0;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		std::size_t nl = text.find('\n', pos);
		std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
		pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
		++line_no;
		if (auto semi = line.find(';'); semi != std::string_view::npos)
			line = line.substr(0, semi);
		line = trim(line);
		if (line.empty())
			continue;
		if (ended)
			throw PlanFormatError(line_no, fmt::format("line {}: nothing may follow the end line", line_no));

		auto colon = line.find(':');
		if (colon == std::string_view::npos)
			throw PlanFormatError(line_no, fmt::format("line {}: expected 'TIME: (action)'", line_no));
		std::string time_text(trim(line.substr(0, colon)));
		char *stop = nullptr;
		double t = std::strtod(time_text.c_str(), &stop);
		if (time_text.empty() || *stop != '\0' || !std::isfinite(t) || t < 0.0)
			throw PlanFormatError(line_no, fmt::format("line {}: bad time '{}'", line_no, time_text));
		double last = plan.happenings.empty() ? 0.0 : plan.happenings.back().time;
		if (t < last)
			throw PlanFormatError(line_no, fmt::format("line {}: time {} is before {}", line_no, t, last));

		std::string_view body = trim(line.substr(colon + 1));
		if (body == "end") {
			plan.makespan = t;
			ended = true;
			continue;
		}
		if (body.size() < 2 || body.front() != '(' || body.back() != ')')
			throw PlanFormatError(line_no, fmt::format("line {}: expected a parenthesised action", line_no));
		auto id = task.find_action(body);
		if (!id)
			throw PlanFormatError(line_no, fmt::format("line {}: unknown action {}", line_no, body));
		if (plan.happenings.empty() || plan.happenings.back().time != t)
			plan.happenings.push_back({t, {}});
		plan.happenings.back().actions.push_back(*id);
		plan.makespan = t;
	}
	return plan;
}

Plan load_plan(const Task &task, const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw PlanFormatError(0, fmt::format("{}: cannot open plan file", path));
	std::ostringstream text;
	text << in.rdbuf();
	return parse_plan(task, text.str());
}

} // namespace hyplan
