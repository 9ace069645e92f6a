#include "hyplan/parser.hpp"
#include "hyplan/dynamics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hyplan;

namespace {

SourceSpan span_of(const std::string &domain, const std::string &problem)
{
	try {
		test::task_from(domain, problem);
	} catch (const ParseError &e) {
		return e.span();
	}
	FAIL("expected a parse error");
	return {};
}

const std::string kFlow = test::real_domain("(x)", "(:process flow :parameters () :precondition (and)"
                                                   " :effect (increase (x) (* #t 2.0)))");

} // namespace

TEST_CASE("process rates come from (* #t EXPR)")
{
	Task t = test::task_from(kFlow, test::problem("(= (x) 0)", "(> (x) 1)"));
	REQUIRE(t.processes.size() == 1);
	REQUIRE(t.processes[0].effects.size() == 1);
	CHECK(eval_term(*t.processes[0].effects[0].rate, t.initial) == 2.0);

	Task d = test::task_from(test::real_domain("(x)", "(:process drain :parameters () :precondition (and)"
	                                                  " :effect (decrease (x) (* #t 3)))"),
	                         test::problem("(= (x) 0)", "(< (x) -1)"));
	CHECK(eval_term(*d.processes[0].effects[0].rate, d.initial) == -3.0);
}

TEST_CASE("zermelo turning process is conditional on the rudder")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	State s = t.initial;
	s[*t.find_variable("(rudder-state)")] = *t.find_object("port-side");
	Mode m = compute_mode(t, s);
	int theta = *t.find_variable("(theta)");
	CHECK(m.affects(theta));
	CHECK(derivative(m, s)[static_cast<Eigen::Index>(
	          std::find(m.affected.begin(), m.affected.end(), theta) - m.affected.begin())] == doctest::Approx(0.2));
	CHECK_FALSE(compute_mode(t, t.initial).affects(theta));
}

TEST_CASE("constraints parse to clauses")
{
	Task t = test::task_from(test::real_domain("(x) (y)", ""),
	                         test::problem("(= (x) 1) (= (y) 1)", "(> (x) 5)",
	                                       "(:constraints (and (or (> (x) 0) (> (y) 0))))"));
	REQUIRE(t.constraints.size() == 1);
	CHECK(std::get<Disjunction>(t.constraints[0]->node).operands.size() == 2);

	CHECK_THROWS_AS(test::task_from(test::real_domain("(x) (y)", ""),
	                                test::problem("(= (x) 1) (= (y) 1)", "(> (x) 5)",
	                                              "(:constraints (or (and (> (x) 0) (> (y) 0)) (> (x) 3)))")),
	                CnfError);
}

TEST_CASE("diagnostics carry positions")
{
	SourceSpan s = span_of(kFlow, "(define (problem p) (:domain d)\n  (:init (= (x) 0))\n  (:goal (> (zz) 1)))");
	CHECK(s.line == 3);
	CHECK(s.column > 1);

	CHECK_THROWS_AS(test::task_from(test::real_domain("(x)", "(:process bad :parameters () :precondition (and)"
	                                                         " :effect (increase (x) (* 2 #t)))"),
	                                test::problem("(= (x) 0)", "(> (x) 1)")),
	                ParseError);
	CHECK_THROWS_AS(test::task_from(kFlow, test::problem("", "(> (x) 1)")), ParseError);
	CHECK_THROWS_AS(parse_domain("(define (domain d) (:requirements :teleportation))"), ParseError);
	CHECK_THROWS_AS(parse_domain("(define (domain d) (:functions (x)) (:durative-action a))"), ParseError);
	CHECK_THROWS_AS(test::load("tests/data/flow-domain.pddl", "tests/data/no-such-problem.pddl"), ParseError);
}

TEST_CASE("type errors")
{
	const std::string dom = R"((define (domain d) (:requirements :typing :object-fluents :numeric-fluents)
	  (:types mode) (:constants on off - mode)
	  (:functions (x) - number (m) - mode)))";
	CHECK_THROWS_AS(test::task_from(dom, "(define (problem p) (:domain d) (:init (= (x) 0) (= (m) on))"
	                                     " (:goal (< (m) 1)))"),
	                TypeError);
	CHECK_THROWS_AS(test::task_from(dom, "(define (problem p) (:domain d) (:init (= (x) on) (= (m) on))"
	                                     " (:goal (> (x) 1)))"),
	                TypeError);
	CHECK_NOTHROW(test::task_from(dom, "(define (problem p) (:domain d) (:init (= (x) 0) (= (m) on))"
	                                   " (:goal (= (m) off)))"));
}

TEST_CASE("keywords are case-insensitive")
{
	CHECK_NOTHROW(test::task_from("(DEFINE (DOMAIN d) (:FUNCTIONS (x)) (:PROCESS f :PARAMETERS ()"
	                              " :PRECONDITION (AND) :EFFECT (INCREASE (x) (* #t 1))))",
	                              "(define (problem p) (:domain d) (:init (= (x) 0)) (:goal (> (x) 1)))"));
}

TEST_CASE("bounds")
{
	Task t = test::task_from(kFlow, test::problem("(= (x) 0)", "(> (x) 1)", "(:bounds :delta-max 4)"));
	CHECK(t.declared_delta_max);
	CHECK(t.config.delta_max == 4.0);
	CHECK(t.config.delta_z == doctest::Approx(0.4));
	Task u = test::task_from(kFlow, test::problem("(= (x) 0)", "(> (x) 1)", "(:bounds :delta-max 4 :delta-z 0.5)"));
	CHECK(u.config.delta_z == 0.5);
}

TEST_CASE("parameterised schemas are grounded over objects")
{
	Task t = test::task_from(R"((define (domain cars) (:requirements :typing :numeric-fluents :processes)
	  (:types car)
	  (:functions (pos ?c - car) (speed ?c - car))
	  (:action stop :parameters (?c - car) :precondition (> (speed ?c) 0) :effect (assign (speed ?c) 0))
	  (:process drive :parameters (?c - car) :precondition (> (speed ?c) 0)
	    :effect (increase (pos ?c) (* #t (speed ?c))))))",
	                         R"((define (problem two) (:domain cars) (:objects a b - car)
	  (:init (= (pos a) 0) (= (pos b) 0) (= (speed a) 1) (= (speed b) 2))
	  (:goal (> (pos a) 3))))");
	CHECK(t.variables.size() == 4);
	CHECK(t.actions.size() == 2);
	CHECK(t.find_action("(stop b)").has_value());
	CHECK(t.processes.size() == 2);
	CHECK(t.find_variable("(pos b)").has_value());
}

TEST_CASE("pretty-printed benchmarks reparse to the same task")
{
	namespace fs = std::filesystem;
	int checked = 0;
	for (const auto &dir : fs::directory_iterator(test::source_path("benchmarks"))) {
		if (!dir.is_directory())
			continue;
		std::string domain_text;
		for (const auto &file : fs::directory_iterator(dir.path())) {
			if (file.path().extension() != ".pddl" || file.path().filename() == "domain.pddl")
				continue;
			Task a = load_task(dir.path() / "domain.pddl", file.path());
			Domain dom = parse_domain(print_domain(parse_domain([&] {
				std::ifstream in(dir.path() / "domain.pddl");
				std::stringstream ss;
				ss << in.rdbuf();
				return ss.str();
			}())));
			Task b = parse_problem(print_problem(a), dom);
			CAPTURE(file.path().string());
			CHECK(a.variable_names() == b.variable_names());
			CHECK(bitwise_equal(a.initial, b.initial));
			REQUIRE(a.actions.size() == b.actions.size());
			for (std::size_t i = 0; i < a.actions.size(); ++i) {
				CHECK(a.actions[i].name == b.actions[i].name);
				CHECK(*a.actions[i].precondition == *b.actions[i].precondition);
			}
			REQUIRE(a.processes.size() == b.processes.size());
			for (std::size_t i = 0; i < a.processes.size(); ++i) {
				CHECK(*a.processes[i].condition == *b.processes[i].condition);
				REQUIRE(a.processes[i].effects.size() == b.processes[i].effects.size());
				for (std::size_t k = 0; k < a.processes[i].effects.size(); ++k)
					CHECK(*a.processes[i].effects[k].rate == *b.processes[i].effects[k].rate);
			}
			CHECK(*a.goal == *b.goal);
			REQUIRE(a.constraints.size() == b.constraints.size());
			for (std::size_t i = 0; i < a.constraints.size(); ++i)
				CHECK(*a.constraints[i] == *b.constraints[i]);
			CHECK(a.config.delta_max == b.config.delta_max);
			CHECK(a.config.delta_z == b.config.delta_z);
			++checked;
		}
	}
	CHECK(checked == 5);
}
