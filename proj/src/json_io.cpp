#include "json_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dagcast {

namespace {

using nlohmann::json;

[[noreturn]] void bad_input(const std::string& msg) { fail(Err::Input, msg); }

const json& expect_object(const json& v, const char* where) {
  if (!v.is_object()) bad_input(std::string(where) + " must be a JSON object");
  return v;
}

const json& expect_array(const json& v, const char* where) {
  if (!v.is_array()) bad_input(std::string(where) + " must be a JSON array");
  return v;
}

std::string expect_string(const json& v, const char* where) {
  if (!v.is_string()) bad_input(std::string(where) + " must be a string");
  return v.get<std::string>();
}

const json& expect_field(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_input(std::string(where) + " is missing \"" + key + "\"");
  return *it;
}

// ["src", "dst"] resolved to a canonical edge id.
int parse_edge_ref(const Network& net, const json& v, const char* where) {
  expect_array(v, where);
  if (v.size() != 2) bad_input(std::string(where) + " must be a [src, dst] pair");
  const std::string src = expect_string(v[0], where);
  const std::string dst = expect_string(v[1], where);
  const int s = net.node_id(src);
  const int d = net.node_id(dst);
  if (s < 0) bad_input(std::string(where) + " names unknown node \"" + src + "\"");
  if (d < 0) bad_input(std::string(where) + " names unknown node \"" + dst + "\"");
  for (int e : net.out_edges(s)) {
    if (net.edge(e).dst == d) return e;
  }
  bad_input(std::string(where) + " names absent edge " + src + "->" + dst);
}

EdgeMask parse_edge_set(const Network& net, const json& v, const char* where) {
  expect_array(v, where);
  EdgeMask mask = 0;
  for (const auto& item : v) {
    const int e = parse_edge_ref(net, item, where);
    const EdgeMask bit = EdgeMask{1} << e;
    if (mask & bit) bad_input(std::string(where) + " lists an edge twice");
    mask |= bit;
  }
  return mask;
}

ConfigTable parse_table(const Network& net, const json& doc) {
  require_keys(doc, "table process", {"type", "configs"});
  const json& configs = expect_array(expect_field(doc, "configs", "table process"), "\"configs\"");
  if (configs.empty()) bad_input("\"configs\" must not be empty");
  ConfigTable table;
  for (const auto& row : configs) {
    expect_object(row, "config entry");
    require_keys(row, "config entry", {"on", "prob"});
    table.masks.push_back(parse_edge_set(net, expect_field(row, "on", "config entry"), "\"on\""));
    table.probs.push_back(parse_probability(expect_field(row, "prob", "config entry"), "\"prob\""));
  }
  validate_config_table(net, table);
  return table;
}

IidLinkProcess parse_iid(const Network& net, const json& doc) {
  const bool scalar = doc.contains("prob");
  const bool per_edge = doc.contains("probs");
  if (scalar == per_edge)
    bad_input("iid process takes exactly one of \"prob\" and \"probs\"");
  IidLinkProcess proc;
  if (scalar) {
    require_keys(doc, "iid process", {"type", "prob"});
    const double p = parse_probability(expect_field(doc, "prob", "iid process"), "\"prob\"");
    proc.p.assign(static_cast<std::size_t>(net.edge_count()), p);
  } else {
    require_keys(doc, "iid process", {"type", "probs"});
    const json& rows = expect_array(expect_field(doc, "probs", "iid process"), "\"probs\"");
    proc.p.assign(static_cast<std::size_t>(net.edge_count()), -1.0);
    for (const auto& row : rows) {
      expect_object(row, "probs entry");
      require_keys(row, "probs entry", {"edge", "prob"});
      const int e = parse_edge_ref(net, expect_field(row, "edge", "probs entry"), "\"edge\"");
      if (proc.p[static_cast<std::size_t>(e)] >= 0.0)
        bad_input("\"probs\" lists an edge twice");
      proc.p[static_cast<std::size_t>(e)] =
          parse_probability(expect_field(row, "prob", "probs entry"), "\"prob\"");
    }
    for (int e = 0; e < net.edge_count(); ++e) {
      if (proc.p[static_cast<std::size_t>(e)] < 0.0)
        bad_input("\"probs\" must cover every edge; missing " +
                  net.node_name(net.edge(e).src) + "->" + net.node_name(net.edge(e).dst));
    }
  }
  validate_iid(net, proc);
  return proc;
}

MarkovConfigProcess parse_markov(const Network& net, const json& doc) {
  require_keys(doc, "markov process", {"type", "states", "transition", "initial"});
  MarkovConfigProcess proc;
  const json& states = expect_array(expect_field(doc, "states", "markov process"), "\"states\"");
  for (const auto& s : states) proc.states.push_back(parse_edge_set(net, s, "\"states\" entry"));
  const json& rows = expect_array(expect_field(doc, "transition", "markov process"), "\"transition\"");
  for (const auto& row : rows) {
    expect_array(row, "\"transition\" row");
    std::vector<double> out;
    for (const auto& cell : row) out.push_back(parse_probability(cell, "\"transition\" entry"));
    proc.transition.push_back(std::move(out));
  }
  if (auto it = doc.find("initial"); it != doc.end()) {
    if (!it->is_number_integer()) bad_input("\"initial\" must be an integer");
    proc.initial = it->get<int>();
  }
  validate_markov(net, proc);
  return proc;
}

json edge_legend(const Network& net) {
  json legend = json::array();
  for (const Edge& e : net.edges())
    legend.push_back(json::array({net.node_name(e.src), net.node_name(e.dst)}));
  return legend;
}

double expect_number(const json& v, const char* where) {
  if (!v.is_number()) bad_input(std::string(where) + " must be a number");
  return v.get<double>();
}

std::int64_t expect_integer(const json& v, const char* where) {
  if (!v.is_number_integer()) bad_input(std::string(where) + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t expect_seed(const json& v, const char* where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  bad_input(std::string(where) + " must be a nonnegative integer");
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json dist_json(const ActivationDist& dist) {
  json rows = json::array();
  for (std::size_t k = 0; k < dist.masks.size(); ++k) {
    json ids = json::array();
    for (int e = 0; e < 64; ++e) {
      if (dist.masks[k] & (EdgeMask{1} << e)) ids.push_back(e);
    }
    rows.push_back(json::array({std::move(ids), dist.weights[k]}));
  }
  return rows;
}

}  // namespace

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> allowed) {
  expect_object(obj, where);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) bad_input(std::string(where) + " has unknown key \"" + it.key() + "\"");
  }
}

double parse_probability(const json& v, const char* where) {
  double p = 0.0;
  if (v.is_number()) {
    p = v.get<double>();
  } else if (v.is_string()) {
    const std::string text = v.get<std::string>();
    char* end = nullptr;
    p = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty())
      bad_input(std::string(where) + " is not a decimal number: \"" + text + "\"");
  } else {
    bad_input(std::string(where) + " must be a number or decimal string");
  }
  if (!(p >= 0.0 && p <= 1.0)) bad_input(std::string(where) + " must lie in [0, 1]");
  return p;
}

Network parse_network(const json& doc) {
  require_keys(doc, "network", {"nodes", "source", "edges"});
  const json& nodes = expect_array(expect_field(doc, "nodes", "network"), "\"nodes\"");
  std::vector<std::string> names;
  for (const auto& n : nodes) names.push_back(expect_string(n, "\"nodes\" entry"));
  const std::string source = expect_string(expect_field(doc, "source", "network"), "\"source\"");
  const json& edges = expect_array(expect_field(doc, "edges", "network"), "\"edges\"");
  std::vector<NamedEdge> named;
  for (const auto& e : edges) {
    expect_object(e, "edge entry");
    require_keys(e, "edge entry", {"src", "dst", "cap"});
    NamedEdge ne;
    ne.src = expect_string(expect_field(e, "src", "edge entry"), "\"src\"");
    ne.dst = expect_string(expect_field(e, "dst", "edge entry"), "\"dst\"");
    if (auto it = e.find("cap"); it != e.end()) {
      if (!it->is_number_integer()) bad_input("\"cap\" must be an integer");
      ne.cap = it->get<std::int64_t>();
    }
    named.push_back(std::move(ne));
  }
  return Network::build(names, source, named);
}

Network parse_network_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad_input("network file is not valid JSON");
  return parse_network(doc);
}

ConfigProcess parse_process(const Network& net, const json& doc) {
  expect_object(doc, "process");
  const std::string type = expect_string(expect_field(doc, "type", "process"), "\"type\"");
  if (type == "table") return parse_table(net, doc);
  if (type == "iid") return parse_iid(net, doc);
  if (type == "markov") return parse_markov(net, doc);
  bad_input("unknown process type \"" + type + "\"");
}

ConfigProcess parse_process_text(const Network& net, const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad_input("process file is not valid JSON");
  return parse_process(net, doc);
}

json capacity_result_json(const Network& net, const CapacityResult& res) {
  json beta = json::object();
  for (std::size_t s = 0; s < res.per_config.size(); ++s)
    beta[std::to_string(s)] = dist_json(res.per_config[s]);
  json tight = json::array();
  for (int v : res.tight_nodes) tight.push_back(net.node_name(v));
  return json{{"lambda_star", res.lambda_star},
              {"tight_nodes", std::move(tight)},
              {"beta_star", std::move(beta)},
              {"edges", edge_legend(net)}};
}

json capacity_bounds_json(const CapacityBounds& b) {
  return json{{"lower", b.lower}, {"upper", b.upper}, {"p", b.marginal}};
}

json approx_capacity_json(const Network& net, const ApproxCapacity& a) {
  return json{{"value", a.value},
              {"p", a.marginal},
              {"certificate", dist_json(a.certificate)},
              {"edges", edge_legend(net)}};
}

SimConfig parse_sim_options(const json& doc) {
  require_keys(doc, "simulation options",
               {"policy", "lambda", "slots", "seed", "warmup", "lambda_design", "update_prob",
                "arrivals", "checks", "queue_stride", "record_trace", "theta", "match_limit"});
  SimConfig cfg;
  cfg.policy = parse_policy(
      expect_string(expect_field(doc, "policy", "simulation options"), "\"policy\""));
  cfg.lambda = expect_number(expect_field(doc, "lambda", "simulation options"), "\"lambda\"");
  cfg.slots = expect_integer(expect_field(doc, "slots", "simulation options"), "\"slots\"");
  cfg.seed = expect_seed(expect_field(doc, "seed", "simulation options"), "\"seed\"");
  if (auto it = doc.find("warmup"); it != doc.end())
    cfg.warmup = expect_integer(*it, "\"warmup\"");
  if (auto it = doc.find("lambda_design"); it != doc.end())
    cfg.lambda_design = expect_number(*it, "\"lambda_design\"");
  if (auto it = doc.find("update_prob"); it != doc.end())
    cfg.update_prob = expect_number(*it, "\"update_prob\"");
  if (auto it = doc.find("arrivals"); it != doc.end())
    cfg.arrivals = parse_arrivals(expect_string(*it, "\"arrivals\""));
  if (auto it = doc.find("checks"); it != doc.end())
    cfg.checks = parse_checks(expect_string(*it, "\"checks\""));
  if (auto it = doc.find("queue_stride"); it != doc.end())
    cfg.queue_stride = expect_integer(*it, "\"queue_stride\"");
  if (auto it = doc.find("record_trace"); it != doc.end()) {
    if (!it->is_boolean()) bad_input("\"record_trace\" must be a boolean");
    cfg.record_trace = it->get<bool>();
  }
  if (auto it = doc.find("theta"); it != doc.end())
    cfg.stability_theta = expect_number(*it, "\"theta\"");
  if (auto it = doc.find("match_limit"); it != doc.end()) {
    const std::int64_t limit = expect_integer(*it, "\"match_limit\"");
    if (limit < 1) bad_input("\"match_limit\" must be positive");
    cfg.match_limit = static_cast<std::size_t>(limit);
  }
  return cfg;
}

json sim_report_json(const Network& net, const SimConfig& cfg, const SimReport& rep) {
  json nodes = json::array();
  for (int v = 0; v < net.node_count(); ++v) nodes.push_back(net.node_name(v));

  json doc{{"schema", 1},
           {"policy", policy_name(cfg.policy)},
           {"lambda", cfg.lambda},
           {"arrivals", arrivals_name(cfg.arrivals)},
           {"slots", rep.slots},
           {"warmup", rep.warmup},
           {"seed", cfg.seed},
           {"update_prob", cfg.update_prob},
           {"total_arrivals", rep.total_arrivals},
           {"nodes", std::move(nodes)},
           {"delivered",
            json{{"count", rep.delivered_count},
                 {"rate", rep.delivered_rate},
                 {"per_node", rep.final_frontier}}},
           {"delay",
            json{{"count", rep.delay.count}, {"mean", rep.delay.mean}, {"max", rep.delay.max}}},
           {"delays", rep.delays},
           {"queue",
            json{{"stride", rep.queue_stride},
                 {"series", rep.queue_series},
                 {"final_sum", rep.final_queue_sum}}},
           {"stability",
            json{{"verdict", stability_name(rep.verdict.kind)},
                 {"slope", rep.verdict.slope},
                 {"theta", rep.verdict.theta},
                 {"threshold", rep.verdict.threshold},
                 {"window", rep.verdict.window}}},
           {"checks",
            json{{"level", checks_name(cfg.checks)}, {"slots_checked", rep.slots_checked}}},
           {"trace_hash", hex64(rep.trace_hash)}};
  if (cfg.policy == PolicyKind::Randomized) doc["lambda_design"] = cfg.lambda_design;
  if (cfg.record_trace) {
    json trace = json::array();
    for (EdgeMask m : rep.trace) trace.push_back(hex64(m));
    doc["trace"] = std::move(trace);
  }
  return doc;
}

SweepSpec parse_sweep_spec(const json& doc) {
  require_keys(doc, "sweep spec",
               {"network", "process", "p_values", "policies", "lambdas", "slots", "seed",
                "warmup", "replications", "lambda_design", "update_prob", "arrivals", "checks",
                "theta", "match_limit"});
  SweepSpec spec{parse_network(expect_field(doc, "network", "sweep spec"))};

  const bool fixed = doc.contains("process");
  if (fixed == doc.contains("p_values"))
    bad_input("sweep spec takes exactly one of \"process\" and \"p_values\"");
  if (fixed) {
    spec.has_process = true;
    spec.process = parse_process(spec.net, doc["process"]);
  } else {
    for (const auto& p : expect_array(doc["p_values"], "\"p_values\""))
      spec.p_values.push_back(expect_number(p, "\"p_values\" entry"));
    if (spec.p_values.empty()) bad_input("\"p_values\" must not be empty");
  }

  for (const auto& l : expect_array(expect_field(doc, "lambdas", "sweep spec"), "\"lambdas\""))
    spec.lambdas.push_back(expect_number(l, "\"lambdas\" entry"));
  spec.slots = expect_integer(expect_field(doc, "slots", "sweep spec"), "\"slots\"");
  spec.seed = expect_seed(expect_field(doc, "seed", "sweep spec"), "\"seed\"");

  if (auto it = doc.find("policies"); it != doc.end()) {
    for (const auto& p : expect_array(*it, "\"policies\""))
      spec.policies.push_back(parse_policy(expect_string(p, "\"policies\" entry")));
    if (spec.policies.empty()) bad_input("\"policies\" must not be empty");
  } else {
    spec.policies = {PolicyKind::MaxWeight};
  }
  if (auto it = doc.find("warmup"); it != doc.end())
    spec.warmup = expect_integer(*it, "\"warmup\"");
  if (auto it = doc.find("replications"); it != doc.end()) {
    const std::int64_t reps = expect_integer(*it, "\"replications\"");
    if (reps < 1 || reps > 1000000) bad_input("\"replications\" out of range");
    spec.replications = static_cast<int>(reps);
  }
  if (auto it = doc.find("lambda_design"); it != doc.end())
    spec.lambda_design = expect_number(*it, "\"lambda_design\"");
  if (auto it = doc.find("update_prob"); it != doc.end())
    spec.update_prob = expect_number(*it, "\"update_prob\"");
  if (auto it = doc.find("arrivals"); it != doc.end())
    spec.arrivals = parse_arrivals(expect_string(*it, "\"arrivals\""));
  if (auto it = doc.find("checks"); it != doc.end())
    spec.checks = parse_checks(expect_string(*it, "\"checks\""));
  if (auto it = doc.find("theta"); it != doc.end())
    spec.stability_theta = expect_number(*it, "\"theta\"");
  if (auto it = doc.find("match_limit"); it != doc.end()) {
    const std::int64_t limit = expect_integer(*it, "\"match_limit\"");
    if (limit < 1) bad_input("\"match_limit\" must be positive");
    spec.match_limit = static_cast<std::size_t>(limit);
  }
  return spec;
}

SweepSpec parse_sweep_spec_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad_input("sweep spec is not valid JSON");
  return parse_sweep_spec(doc);
}

std::string error_json(const char* name, const std::string& message) {
  return json{{"error", name}, {"message", message}}.dump();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_input("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) bad_input("invalid JSON in file: " + path);
  return doc;
}

}  // namespace dagcast
