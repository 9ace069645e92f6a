#include "hyplan/sexpr.hpp"

#include <fmt/format.h>

#include <cctype>

namespace hyplan {

std::string to_string(const SourceSpan &span)
{
	return fmt::format("{}:{}:{}", span.file, span.line, span.column);
}

ParseError::ParseError(SourceSpan span, const std::string &message)
    : Error(fmt::format("{}: {}", to_string(span), message)), span_(std::move(span)), message_(message)
{
}

std::string lowercase(std::string_view s)
{
	std::string out(s);
	for (char &c : out)
		c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
	return out;
}

bool SExpr::is_keyword(std::string_view keyword) const
{
	return !is_list && lowercase(text) == keyword;
}

std::string SExpr::head() const
{
	if (!is_list || items.empty() || items[0].is_list)
		return {};
	return lowercase(items[0].text);
}

namespace {

class Reader {
public:
	Reader(std::string_view text, const std::string &file) : text_(text), file_(file) {}

	std::vector<SExpr> read_all()
	{
		std::vector<SExpr> out;
		skip();
		while (pos_ < text_.size()) {
			out.push_back(read());
			skip();
		}
		return out;
	}

private:
	SourceSpan here() const { return {file_, line_, col_}; }

	void advance()
	{
		if (text_[pos_] == '\n') {
			++line_;
			col_ = 1;
		} else {
			++col_;
		}
		++pos_;
	}

	void skip()
	{
		while (pos_ < text_.size()) {
			char c = text_[pos_];
			if (c == ';') {
				while (pos_ < text_.size() && text_[pos_] != '\n')
					advance();
			} else if (std::isspace(static_cast<unsigned char>(c))) {
				advance();
			} else {
				break;
			}
		}
	}

	SExpr read()
	{
		SExpr e;
		e.span = here();
		char c = text_[pos_];
		if (c == ')')
			throw ParseError(e.span, "unexpected ')'");
		if (c == '(') {
			e.is_list = true;
			advance();
			skip();
			while (pos_ < text_.size() && text_[pos_] != ')') {
				e.items.push_back(read());
				skip();
			}
			if (pos_ >= text_.size())
				throw ParseError(e.span, "unbalanced '(': missing ')'");
			advance();
			return e;
		}
		std::size_t start = pos_;
		while (pos_ < text_.size()) {
			char d = text_[pos_];
			if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d)))
				break;
			advance();
		}
		e.text = std::string(text_.substr(start, pos_ - start));
		return e;
	}

	std::string_view text_;
	std::string file_;
	std::size_t pos_ = 0;
	int line_ = 1;
	int col_ = 1;
};

} // namespace

std::vector<SExpr> read_sexprs(std::string_view text, const std::string &file)
{
	return Reader(text, file).read_all();
}

std::string to_string(const SExpr &e)
{
	if (!e.is_list)
		return e.text;
	std::string s = "(";
	for (std::size_t i = 0; i < e.items.size(); ++i) {
		if (i)
			s += ' ';
		s += to_string(e.items[i]);
	}
	return s + ")";
}

} // namespace hyplan
