#include "hyplan/search.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace hyplan;

namespace {

SimLabel wait(double d, bool truncated = false)
{
	SimLabel l;
	l.duration = d;
	l.truncated = truncated;
	return l;
}

} // namespace

TEST_CASE("successors of a state")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	int applicable = 0;
	for (const auto &a : t.actions)
		applicable += try_apply_action(t, t.initial, a).has_value();
	// the rudder starts straight: port and starboard apply, ahead does not
	CHECK(applicable == 2);
	SimOutcome out = Simulator(t, {}).sim(t.initial);
	REQUIRE(out.successor);
	CHECK(out.successor->clock == 1.0);
	CHECK_FALSE(out.label.truncated);
}

TEST_CASE("a wait stops before a constraint crossing")
{
	Task t = test::load("tests/data/flow-domain.pddl", "tests/data/flow-wall.pddl");
	SimOutcome out = Simulator(t, {}).sim(t.initial);
	REQUIRE(out.successor);
	CHECK(out.successor->clock == doctest::Approx(0.5));
	CHECK(out.label.truncated);
	CHECK(out.label.origin == Origin::GlobalConstraint);
	CHECK(out.label.atom == "(<= (x) 10)");

	// pinned against the wall the wait has nowhere to go
	SimOutcome stuck = Simulator(t, {}).sim(*out.successor);
	CHECK_FALSE(stuck.successor);

	SearchResult r = search(t, {});
	CHECK(r.status == SearchStatus::Unsolvable);
}

TEST_CASE("waiting without processes is pruned")
{
	Task t = test::task_from(test::real_domain("(x)", ""), test::problem("(= (x) 0)", "(> (x) 1)"));
	CHECK_FALSE(Simulator(t, {}).sim(t.initial).successor);
	SearchResult r = search(t, {});
	CHECK(r.status == SearchStatus::Unsolvable);
	CHECK(r.stats.expansions <= 1);
}

TEST_CASE("goal in the initial state")
{
	Task t = test::task_from(test::real_domain("(x)", ""), test::problem("(= (x) 3)", "(> (x) 1)"));
	SearchResult r = search(t, {});
	REQUIRE(r.status == SearchStatus::Solved);
	CHECK(r.plan->happenings.empty());
	CHECK(r.plan->intervals.empty());
	CHECK(r.plan->makespan == 0.0);
}

TEST_CASE("flow plan ends on the goal crossing")
{
	Task t = test::load("tests/data/flow-domain.pddl", "tests/data/flow-goal.pddl");
	for (auto algorithm : {Algorithm::Gbfs, Algorithm::Bfs}) {
		SearchOptions o;
		o.algorithm = algorithm;
		SearchResult r = search(t, o);
		CAPTURE(to_string(algorithm));
		REQUIRE(r.status == SearchStatus::Solved);
		const Plan &p = *r.plan;
		REQUIRE(p.intervals.size() == 3);
		CHECK(p.intervals[0].end == 1.0);
		CHECK(p.intervals[1].end == 2.0);
		CHECK(p.intervals[2].truncated);
		CHECK(p.intervals[2].origin == Origin::GoalNegation);
		CHECK(std::abs(p.makespan - 2.5) <= t.config.delta_h());
		CHECK(r.goal_state[0] >= 2.5);
	}

	SearchOptions naive;
	naive.zero_crossing = false;
	SearchResult r = search(t, naive);
	REQUIRE(r.status == SearchStatus::Solved);
	CHECK(r.plan->makespan == 3.0);
}

TEST_CASE("plan extraction")
{
	Plan a = extract_plan({0, 1, wait(1.0)}, {0, 0, 0, 1}, 1.0);
	REQUIRE(a.happenings.size() == 1);
	CHECK(a.happenings[0].time == 0.0);
	CHECK(a.happenings[0].actions == std::vector<int>{0, 1});
	REQUIRE(a.intervals.size() == 1);
	CHECK(a.intervals[0].end == 1.0);

	Plan b = extract_plan({wait(1.0), 0, wait(0.5, true)}, {0, 1, 1, 1.5}, 1.0);
	REQUIRE(b.happenings.size() == 1);
	CHECK(b.happenings[0].time == 1.0);
	REQUIRE(b.intervals.size() == 2);
	CHECK(b.intervals[1].start == 1.0);
	CHECK(b.intervals[1].end == 1.5);
	CHECK(b.makespan == 1.5);

	CHECK_THROWS_AS(extract_plan({0}, {0, 1}, 1.0), InternalInconsistency);
	CHECK_THROWS_AS(extract_plan({wait(2.0)}, {0, 2}, 1.0), InternalInconsistency);
	CHECK_THROWS_AS(extract_plan({wait(1.0)}, {0}, 1.0), InternalInconsistency);
}

TEST_CASE("rudder schedule with a crossing")
{
	// starboard, 1 wait, ahead, 4 waits, starboard, 1 wait, ahead, 14 waits
	// and a 30 s wait cut short, port, 1 wait, ahead
	std::vector<Label> path;
	std::vector<double> clocks{0};
	auto act = [&](int a) {
		path.push_back(a);
		clocks.push_back(clocks.back());
	};
	auto sim = [&](double d, bool cut = false) {
		path.push_back(wait(d, cut));
		clocks.push_back(clocks.back() + d);
	};
	act(1);
	sim(100);
	act(2);
	for (int i = 0; i < 4; ++i)
		sim(100);
	act(1);
	sim(100);
	act(2);
	for (int i = 0; i < 14; ++i)
		sim(100);
	sim(30, true);
	act(0);
	sim(100);
	act(2);
	Plan p = extract_plan(path, clocks, 100);
	std::vector<double> times;
	for (const auto &h : p.happenings)
		times.push_back(h.time);
	CHECK(times == std::vector<double>{0, 100, 500, 600, 2030, 2130});
	CHECK(p.intervals.size() == 22);
	CHECK(p.makespan == 2130);
}

TEST_CASE("replaying a path reproduces the goal state bit for bit")
{
	for (const char *problem : {"constant-wind", "shear-wind", "triangle"}) {
		Task t = test::load("benchmarks/zermelo/domain.pddl", std::string("benchmarks/zermelo/") + problem + ".pddl");
		SearchOptions o;
		SearchResult r = search(t, o);
		CAPTURE(problem);
		REQUIRE(r.status == SearchStatus::Solved);
		CHECK(bitwise_equal(replay_path(t, o, r.path), r.goal_state));
		CHECK(eval_formula(*t.goal, r.goal_state));
		// rerunning the search gives the same plan
		SearchResult again = search(t, o);
		CHECK(again.stats.expansions == r.stats.expansions);
		CHECK(bitwise_equal(again.goal_state, r.goal_state));
	}
}

TEST_CASE("breadth-first search")
{
	Task t = test::load("benchmarks/linear-car/domain.pddl", "benchmarks/linear-car/reach-10.pddl");
	SearchOptions o;
	o.algorithm = Algorithm::Bfs;
	SearchResult r = search(t, o);
	REQUIRE(r.status == SearchStatus::Solved);
	CHECK(eval_formula(*t.goal, r.goal_state));
	CHECK(bitwise_equal(replay_path(t, o, r.path), r.goal_state));
}

TEST_CASE("resource caps")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/triangle.pddl");
	SearchOptions o;
	o.node_cap = 5;
	SearchResult r = search(t, o);
	CHECK(r.status == SearchStatus::NodeCapReached);
	CHECK(r.stats.expansions <= 5);
	CHECK(std::string(to_string(r.status)) == "node-cap");

	o.node_cap = 10'000'000;
	o.time_cap_seconds = 0.0;
	CHECK(search(t, o).status == SearchStatus::TimeCapReached);
}

TEST_CASE("quantized duplicate detection")
{
	Task t = test::load("benchmarks/zermelo/domain.pddl", "benchmarks/zermelo/constant-wind.pddl");
	SearchOptions o;
	o.quantize = 1e-6;
	SearchResult r = search(t, o);
	REQUIRE(r.status == SearchStatus::Solved);
	CHECK(bitwise_equal(replay_path(t, o, r.path), r.goal_state));

	// port then starboard leaves the rudder where it was
	Task car = test::load("benchmarks/linear-car/domain.pddl", "benchmarks/linear-car/reach-10.pddl");
	o.algorithm = Algorithm::Bfs;
	SearchResult q = search(car, o);
	REQUIRE(q.status == SearchStatus::Solved);
	CHECK(q.stats.duplicates > 0);
}

TEST_CASE("algorithm names")
{
	CHECK(parse_algorithm("gbfs") == Algorithm::Gbfs);
	CHECK(parse_algorithm("bfs") == Algorithm::Bfs);
	CHECK_THROWS(parse_algorithm("astar"));
}
