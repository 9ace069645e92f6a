#include "hyplan/report.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyplan {

void Trace::record(const State &s)
{
	if (!states_.empty() && s.clock <= states_.back().clock) {
		if (s.clock == states_.back().clock)
			states_.back() = s;
		return;
	}
	states_.push_back(s);
}

std::string column_name(const StateVariable &v)
{
	const std::string &n = v.name;
	if (n.size() >= 2 && n.front() == '(' && n.back() == ')')
		return n.substr(1, n.size() - 2);
	return n;
}

std::optional<int> lookup_variable(const Task &task, std::string_view name)
{
	if (auto v = task.find_variable(name))
		return v;
	return task.find_variable(fmt::format("({})", name));
}

namespace {

std::string csv_field(const std::string &s)
{
	if (s.find_first_of(",\"\r\n") == std::string::npos)
		return s;
	std::string q = "\"";
	for (char c : s) {
		if (c == '"')
			q += '"';
		q += c;
	}
	return q + '"';
}

std::vector<std::string> names_of(const Task &task, const std::vector<int> &ids)
{
	std::vector<std::string> out;
	for (int p : ids)
		out.push_back(task.processes[static_cast<std::size_t>(p)].name);
	return out;
}

nlohmann::json number(double v)
{
	if (std::isfinite(v))
		return v;
	return nullptr;
}

struct Bounds {
	double lo = -std::numeric_limits<double>::infinity();
	double hi = std::numeric_limits<double>::infinity();
};

/// Collects `var rel constant` atoms of a conjunctive goal; false when the
/// goal has any other shape.
bool goal_bounds(const Formula &f, std::vector<Bounds> &bounds)
{
	if (const auto *c = std::get_if<Conjunction>(&f.node)) {
		for (const auto &g : c->operands)
			if (!goal_bounds(*g, bounds))
				return false;
		return true;
	}
	const auto *a = std::get_if<Atom>(&f.node);
	if (!a)
		return false;
	const auto *lv = std::get_if<StateVariableRef>(&a->lhs->node);
	const auto *rv = std::get_if<StateVariableRef>(&a->rhs->node);
	const auto *lc = std::get_if<NumericConstant>(&a->lhs->node);
	const auto *rc = std::get_if<NumericConstant>(&a->rhs->node);
	int var;
	double value;
	Relation rel = a->rel;
	if (lv && rc) {
		var = lv->variable;
		value = rc->value;
	} else if (lc && rv) {
		var = rv->variable;
		value = lc->value;
		rel = mirror(rel);
	} else {
		return false;
	}
	auto &b = bounds[static_cast<std::size_t>(var)];
	if (rel == Relation::Le || rel == Relation::Lt || rel == Relation::Eq)
		b.hi = std::min(b.hi, value);
	if (rel == Relation::Ge || rel == Relation::Gt || rel == Relation::Eq)
		b.lo = std::max(b.lo, value);
	return true;
}

} // namespace

void write_csv(std::ostream &out, const Task &task, const std::vector<State> &states)
{
	std::vector<int> columns;
	out << 't';
	for (std::size_t v = 0; v < task.variables.size(); ++v)
		if (task.variables[v].type.kind == ValueKind::Real) {
			columns.push_back(static_cast<int>(v));
			out << ',' << csv_field(column_name(task.variables[v]));
		}
	out << '\n';
	double last = -std::numeric_limits<double>::infinity();
	for (std::size_t i = 0; i < states.size(); ++i) {
		const State &s = states[i];
		// several states may share a time (actions); keep the last of them
		if (s.clock <= last || (i + 1 < states.size() && states[i + 1].clock == s.clock))
			continue;
		last = s.clock;
		fmt::print(out, "{}", s.clock);
		for (int v : columns)
			fmt::print(out, ",{}", s[v]);
		out << '\n';
	}
}

void write_svg(std::ostream &out, const Task &task, const std::vector<State> &states, int x_var, int y_var)
{
	const double width = 640.0;
	const double height = 640.0;
	const double pad = 40.0;

	std::vector<Bounds> bounds(task.variables.size());
	bool boxed = goal_bounds(*task.goal, bounds);
	const Bounds bx = bounds[static_cast<std::size_t>(x_var)];
	const Bounds by = bounds[static_cast<std::size_t>(y_var)];
	boxed = boxed && std::isfinite(bx.lo) && std::isfinite(bx.hi) && std::isfinite(by.lo) && std::isfinite(by.hi);

	double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
	double ymin = xmin, ymax = -xmin;
	auto extend = [&](double x, double y) {
		xmin = std::min(xmin, x);
		xmax = std::max(xmax, x);
		ymin = std::min(ymin, y);
		ymax = std::max(ymax, y);
	};
	for (const auto &s : states)
		extend(s[x_var], s[y_var]);
	if (boxed) {
		extend(bx.lo, by.lo);
		extend(bx.hi, by.hi);
	}
	if (!std::isfinite(xmin)) {
		xmin = ymin = 0.0;
		xmax = ymax = 1.0;
	}
	double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
	auto px = [&](double x) { return pad + (x - xmin) / span * (width - 2 * pad); };
	auto py = [&](double y) { return height - pad - (y - ymin) / span * (height - 2 * pad); };

	fmt::print(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
	           width, height, width, height);
	fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
	if (boxed)
		fmt::print(out,
		           "<rect class=\"goal\" x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"none\" "
		           "stroke=\"green\"/>\n",
		           px(bx.lo), py(by.hi), px(bx.hi) - px(bx.lo), py(by.lo) - py(by.hi));
	if (!states.empty()) {
		out << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"black\" points=\"";
		for (std::size_t i = 0; i < states.size(); ++i)
			fmt::print(out, "{}{:.3f},{:.3f}", i ? " " : "", px(states[i][x_var]), py(states[i][y_var]));
		out << "\"/>\n";
		fmt::print(out, "<circle class=\"start\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"5\" fill=\"none\" stroke=\"blue\"/>\n",
		           px(states.front()[x_var]), py(states.front()[y_var]));
	}
	fmt::print(out, "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n", pad, height - 10,
	           column_name(task.variables[static_cast<std::size_t>(x_var)]));
	fmt::print(out, "<text x=\"10\" y=\"{}\" font-size=\"12\">{}</text>\n", pad - 10,
	           column_name(task.variables[static_cast<std::size_t>(y_var)]));
	out << "</svg>\n";
}

nlohmann::json config_json(const SimConfig &config)
{
	return {
	    {"delta_max", config.delta_max},
	    {"delta_min", config.delta_min},
	    {"delta_z", config.delta_z},
	    {"delta_h_factor", config.delta_h_factor},
	    {"delta_h", config.delta_h()},
	    {"epsilon", config.fixpoint_epsilon},
	};
}

nlohmann::json plan_json(const Task &task, const SearchOptions &options, const SearchResult &result)
{
	nlohmann::json config = config_json(task.config);
	config["integrator"] = to_string(options.integrator);
	config["search"] = to_string(options.algorithm);
	config["zero_crossing"] = options.zero_crossing;
	config["quantize"] = options.quantize ? nlohmann::json(*options.quantize) : nlohmann::json(nullptr);
	config["node_cap"] = options.node_cap;
	config["time_cap_seconds"] = options.time_cap_seconds;

	const auto &st = result.stats;
	nlohmann::json j = {
	    {"schema_version", kSchemaVersion},
	    {"domain", task.domain_name},
	    {"problem", task.problem_name},
	    {"status", to_string(result.status)},
	    {"makespan", nullptr},
	    {"expansions", st.expansions},
	    {"generations", st.generations},
	    {"evaluations", st.evaluations},
	    {"runtime_seconds", st.runtime_seconds},
	    {"config", config},
	    {"diagnostics",
	     {{"sims", st.sims},
	      {"sims_pruned", st.sims_pruned},
	      {"crossings", st.crossings},
	      {"duplicates", st.duplicates},
	      {"dead_ends", st.dead_ends},
	      {"initial_h", number(st.initial_h)},
	      {"initial_distinct_actions", st.initial_distinct_actions}}},
	};
	if (!result.plan)
		return j;
	const Plan &plan = *result.plan;
	j["makespan"] = plan.makespan;
	nlohmann::json happenings = nlohmann::json::array();
	for (const auto &h : plan.happenings) {
		nlohmann::json names = nlohmann::json::array();
		for (int a : h.actions)
			names.push_back(task.actions[static_cast<std::size_t>(a)].name);
		happenings.push_back({{"time", h.time}, {"actions", names}});
	}
	j["happenings"] = happenings;
	nlohmann::json intervals = nlohmann::json::array();
	for (const auto &iv : plan.intervals) {
		nlohmann::json e = {
		    {"start", iv.start},
		    {"end", iv.end},
		    {"duration", iv.end - iv.start},
		    {"mode", names_of(task, iv.mode)},
		    {"crossed", iv.origin.has_value()},
		    {"truncated", iv.truncated},
		};
		if (iv.origin) {
			e["origin"] = to_string(*iv.origin);
			e["atom"] = iv.atom;
		}
		intervals.push_back(e);
	}
	j["intervals"] = intervals;
	return j;
}

nlohmann::json validation_json(const Task &task, const ValidationReport &report)
{
	nlohmann::json intervals = nlohmann::json::array();
	for (const auto &iv : report.intervals) {
		nlohmann::json margins = nlohmann::json::array();
		for (const auto &m : iv.margins)
			margins.push_back({{"atom", m.atom}, {"origin", to_string(m.origin)}, {"min_margin", number(m.margin)}});
		nlohmann::json e = {
		    {"start", iv.start},
		    {"end", iv.end},
		    {"duration", iv.end - iv.start},
		    {"mode", names_of(task, iv.mode)},
		    {"margins", margins},
		};
		if (iv.event)
			e["event"] = to_string(*iv.event);
		intervals.push_back(e);
	}
	nlohmann::json j = {
	    {"schema_version", kSchemaVersion},
	    {"domain", task.domain_name},
	    {"problem", task.problem_name},
	    {"verdict", report.valid ? "VALID" : "INVALID"},
	    {"makespan", report.makespan},
	    {"integrator", to_string(report.settings.integrator)},
	    {"dz", report.settings.delta_z},
	    {"delta_h", report.settings.delta_z * report.settings.delta_h_factor},
	    {"epsilon", report.settings.epsilon},
	    {"intervals", intervals},
	};
	if (report.violation) {
		const auto &v = *report.violation;
		j["violation"] = {
		    {"time", v.time},
		    {"atom", v.atom},
		    {"origin", v.origin ? nlohmann::json(to_string(*v.origin)) : nlohmann::json(nullptr)},
		    {"cause", v.cause},
		};
	}
	nlohmann::json final_state = nlohmann::json::object();
	for (std::size_t v = 0; v < task.variables.size(); ++v) {
		double value = report.final_state[static_cast<int>(v)];
		if (task.variables[v].type.kind == ValueKind::Object)
			final_state[column_name(task.variables[v])] = task.objects[static_cast<std::size_t>(value)].name;
		else
			final_state[column_name(task.variables[v])] = value;
	}
	j["final_state"] = final_state;
	return j;
}

} // namespace hyplan
