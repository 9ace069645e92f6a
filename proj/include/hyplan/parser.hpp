#pragma once

#include "hyplan/model.hpp"
#include "hyplan/sexpr.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hyplan {

struct ParameterDecl {
	std::string name; ///< including the leading '?'
	int type;
};

/// An action or process schema; bodies are kept as checked S-expressions and
/// grounded against the problem's objects.
struct Schema {
	std::string name;
	std::vector<ParameterDecl> parameters;
	SExpr precondition;
	SExpr effect;
	SourceSpan span;
};

struct Domain {
	std::string name;
	std::vector<std::string> requirements;
	std::vector<ObjectType> types; ///< types[0] is the root type "object"
	std::vector<Object> constants;
	std::vector<FluentDecl> fluents;
	std::vector<Schema> actions;
	std::vector<Schema> processes;
};

Domain parse_domain(std::string_view text, const std::string &file = "<domain>");
Task parse_problem(std::string_view text, const Domain &domain, const std::string &file = "<problem>");

/// Reads both files; I/O failures are reported as ParseError.
Task load_task(const std::filesystem::path &domain_file, const std::filesystem::path &problem_file);

std::string print_domain(const Domain &domain);
std::string print_problem(const Task &task);

} // namespace hyplan
