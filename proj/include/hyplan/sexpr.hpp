#pragma once

#include "hyplan/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hyplan {

/// 1-based position of a token in a source file.
struct SourceSpan {
	std::string file;
	int line = 1;
	int column = 1;
};

std::string to_string(const SourceSpan &span);

class ParseError : public Error {
public:
	ParseError(SourceSpan span, const std::string &message);
	const SourceSpan &span() const { return span_; }
	const std::string &message() const { return message_; }

private:
	SourceSpan span_;
	std::string message_;
};

/// Ill-typed term, atom or effect.
class TypeError : public ParseError {
public:
	using ParseError::ParseError;
};

/// :constraints that is not a conjunction of disjunctions of relational atoms.
class CnfError : public ParseError {
public:
	using ParseError::ParseError;
};

struct SExpr {
	bool is_list = false;
	std::string text; ///< token text for atoms
	std::vector<SExpr> items;
	SourceSpan span;

	bool is_atom() const { return !is_list; }
	/// Case-insensitive comparison of an atom against a keyword.
	bool is_keyword(std::string_view keyword) const;
	/// Head atom of a list, lower-cased; empty when not applicable.
	std::string head() const;
	std::size_t size() const { return items.size(); }
	const SExpr &operator[](std::size_t i) const { return items[i]; }
};

/// Reads every top-level expression; `;` starts a comment running to the end
/// of the line.
std::vector<SExpr> read_sexprs(std::string_view text, const std::string &file);

std::string to_string(const SExpr &e);
std::string lowercase(std::string_view s);

} // namespace hyplan
