#include "hyplan/search.hpp"
#include "hyplan/validate.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace hyplan;

TEST_CASE("empty plan on a goal state")
{
	Task t = test::task_from(test::real_domain("(x)", ""), test::problem("(= (x) 3)", "(> (x) 1)"));
	ValidationReport r = validate_plan(t, Plan{});
	CHECK(r.valid);
	CHECK(r.makespan == 0.0);
	CHECK(r.intervals.empty());

	Task no = test::task_from(test::real_domain("(x)", ""), test::problem("(= (x) 0)", "(> (x) 1)"));
	ValidationReport bad = validate_plan(no, Plan{});
	CHECK_FALSE(bad.valid);
	REQUIRE(bad.violation);
	CHECK(bad.violation->cause.find("goal") != std::string::npos);
}

TEST_CASE("planned flow makespan validates")
{
	Task t = test::load("tests/data/flow-domain.pddl", "tests/data/flow-goal.pddl");
	SearchResult s = search(t, {});
	REQUIRE(s.plan);
	ValidationReport r = validate_plan(t, *s.plan);
	CHECK(r.valid);
	CHECK(r.final_state[0] >= 2.5);
	CHECK(r.final_state[0] <= 2.501);
	CHECK(r.final_state.clock == doctest::Approx(2.5));

	// stopping short misses the goal
	Plan early = *s.plan;
	early.makespan = 2.4;
	CHECK_FALSE(validate_plan(t, early).valid);
}

TEST_CASE("a wait through the band is caught")
{
	Task t = test::load("tests/data/flow-domain.pddl", "tests/data/flow-band.pddl");
	Plan p = parse_plan(t, "9.000: end\n");
	CHECK(p.makespan == 9.0);
	ValidationReport r = validate_plan(t, p);
	CHECK_FALSE(r.valid);
	REQUIRE(r.violation);
	ValidationSettings d;
	CHECK(std::abs(r.violation->time - 4.0) <= 10 * d.delta_z * d.delta_h_factor);
	CHECK(r.violation->origin == Origin::GlobalConstraint);
	CHECK(r.violation->atom == "(<= (x) 4)");

	// the same plan passes under the coarse end-point check the planner used
	SearchOptions naive;
	naive.zero_crossing = false;
	SearchResult s = search(t, naive);
	REQUIRE(s.plan);
	CHECK(s.plan->makespan == 9.0);
	CHECK(search(t, {}).status == SearchStatus::Unsolvable);
}

TEST_CASE("inapplicable actions and integration failures")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	// ahead needs the rudder turned
	ValidationReport r = validate_plan(t, parse_plan(t, "0.000: (ahead)\n1.000: end\n"));
	CHECK_FALSE(r.valid);
	REQUIRE(r.violation);
	CHECK(r.violation->time == 0.0);
}

TEST_CASE("every integrator validates the planned benchmarks")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	SearchResult s = search(t, {});
	REQUIRE(s.plan);
	ValidationSettings v;
	for (auto kind : {Integrator::ExplicitEuler, Integrator::RK22Midpoint, Integrator::ImplicitEuler}) {
		v.integrator = kind;
		CAPTURE(to_string(kind));
		CHECK(validate_plan(t, *s.plan, v).valid);
	}
}

TEST_CASE("validation summaries")
{
	Task t = test::load("tests/data/flow-domain.pddl", "tests/data/flow-goal.pddl");
	Plan p = parse_plan(t, "2.5: end\n");
	ValidationReport r = validate_plan(t, p);
	CHECK(r.valid);
	REQUIRE_FALSE(r.intervals.empty());
	CHECK(r.intervals.front().start == 0.0);
	CHECK(r.intervals.back().end == doctest::Approx(2.5));
	CHECK(r.intervals.front().mode == std::vector<int>{0});
}

TEST_CASE("plan text round trip")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	std::string text = "; a comment\n0.000: (port)\n0.000: (ahead) ; trailing\n\n4.000: (starboard)\n7.470: end\n";
	Plan p = parse_plan(t, text);
	REQUIRE(p.happenings.size() == 2);
	CHECK(p.happenings[0].actions.size() == 2);
	CHECK(p.makespan == 7.47);
	std::string out = format_plan(t, p);
	CHECK(out == "0.000: (port)\n0.000: (ahead)\n4.000: (starboard)\n7.470: end\n");
	Plan again = parse_plan(t, out);
	CHECK(again.makespan == p.makespan);
	CHECK(again.happenings.size() == p.happenings.size());

	// without an end line the makespan is the last action time
	CHECK(parse_plan(t, "0: (port)\n2.5: (ahead)\n").makespan == 2.5);

	CHECK(format_time(2.5) == "2.500");
	CHECK(format_time(0.1 + 0.2) == "0.300");
	CHECK(format_time(2.5004) == "2.5004");
	CHECK(format_time(1234.0) == "1234.000");
}

TEST_CASE("plan format errors name the line")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	auto line_of = [&](const std::string &text) {
		try {
			parse_plan(t, text);
		} catch (const PlanFormatError &e) {
			return e.line();
		}
		return -1;
	};
	CHECK(line_of("0: (port)\n1: (jump)\n") == 2);
	CHECK(line_of("1: (port)\n0.5: (ahead)\n") == 2);
	CHECK(line_of("0: (port)\n1: end\n2: (ahead)\n") == 3);
	CHECK(line_of("; header\n\nport at zero\n") == 3);
	CHECK(line_of("x: (port)\n") == 1);
	CHECK(line_of("0: port\n") == 1);
	CHECK_THROWS_AS(load_plan(t, test::source_path("tests/data/no-such-plan.txt")), PlanFormatError);
}
