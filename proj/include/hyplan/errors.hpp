#pragma once

#include <stdexcept>
#include <string>

namespace hyplan {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Raised while evaluating a term or formula: division by zero, even root of
/// a negative number, non-finite result, non-integral integer assignment.
/// Callers treat the state being evaluated as a dead end.
class EvaluationError : public Error {
public:
	using Error::Error;
};

/// Structural problems with a task (duplicate effect targets, bad config,
/// initial state violating constraints, ...).
class ModelError : public Error {
public:
	using Error::Error;
};

class NotApplicable : public Error {
public:
	NotApplicable(int index, const std::string &what)
	    : Error(what), index_(index)
	{
	}
	/// Position of the failing action inside a sequence (0 for a single action).
	int index() const { return index_; }

private:
	int index_;
};

class ConstraintViolation : public Error {
public:
	ConstraintViolation(int clause, const std::string &what)
	    : Error(what), clause_(clause)
	{
	}
	int clause() const { return clause_; }

private:
	int clause_;
};

class IntegrationFailure : public Error {
public:
	IntegrationFailure(int step, const std::string &what)
	    : Error(what), step_(step)
	{
	}
	int step() const { return step_; }

private:
	int step_;
};

class StrengtheningVacuous : public Error {
public:
	using Error::Error;
};

class InternalInconsistency : public Error {
public:
	using Error::Error;
};

class PlanFormatError : public Error {
public:
	PlanFormatError(int line, const std::string &what)
	    : Error(what), line_(line)
	{
	}
	int line() const { return line_; }

private:
	int line_;
};

} // namespace hyplan
