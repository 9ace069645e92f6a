#pragma once

#include "hyplan/parser.hpp"

#include <string>

namespace test {

inline std::string source_path(const std::string &relative)
{
	return std::string(HYPLAN_SOURCE_DIR) + "/" + relative;
}

inline hyplan::Task load(const std::string &domain, const std::string &problem)
{
	return hyplan::load_task(source_path(domain), source_path(problem));
}

inline hyplan::Task task_from(const std::string &domain, const std::string &problem)
{
	return hyplan::parse_problem(problem, hyplan::parse_domain(domain));
}

/// A domain whose only fluents are reals named in `fluents` and whose
/// processes are given verbatim.
inline std::string real_domain(const std::string &fluents, const std::string &body)
{
	return "(define (domain d) (:requirements :numeric-fluents :processes :constraints)"
	       " (:functions " +
	       fluents + ") " + body + ")";
}

inline std::string problem(const std::string &init, const std::string &goal, const std::string &rest = "")
{
	return "(define (problem p) (:domain d) (:init " + init + ") (:goal " + goal + ") " + rest + ")";
}

inline hyplan::State state_of(const hyplan::Task &task, std::initializer_list<std::pair<const char *, double>> values)
{
	hyplan::State s = task.initial;
	for (const auto &[name, v] : values)
		s[*task.find_variable(std::string("(") + name + ")")] = v;
	return s;
}

} // namespace test
