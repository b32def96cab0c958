#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "capacity.hpp"
#include "json_io.hpp"

using namespace dagcast;
using nlohmann::json;

namespace {

const char* kTwoLinkNet = R"({
  "nodes": ["r", "a", "b"],
  "source": "r",
  "edges": [{"src": "r", "dst": "a"}, {"src": "r", "dst": "b"}]
})";

// Independent per-link coin flips at 1/2, written as an explicit table.
const char* kCaseOneTable = R"({
  "type": "table",
  "configs": [
    {"on": [], "prob": "0.25"},
    {"on": [["r", "a"]], "prob": 0.25},
    {"on": [["r", "b"]], "prob": 0.25},
    {"on": [["r", "a"], ["r", "b"]], "prob": "0.25"}
  ]
})";

template <typename Fn>
Err kind_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a failure");
  return Err::Input;
}

}  // namespace

TEST_CASE("network parsing fills defaults and resolves names") {
  Network net = parse_network_text(kTwoLinkNet);
  CHECK(net.node_count() == 3);
  CHECK(net.edge_count() == 2);
  CHECK(net.source() == 0);
  CHECK(net.cap(0) == 1);  // cap defaults to 1
  CHECK(net.edge(1).dst == net.node_id("b"));

  Network capped = parse_network_text(
      R"({"nodes": ["r","a"], "source": "r", "edges": [{"src":"r","dst":"a","cap":3}]})");
  CHECK(capped.cap(0) == 3);
}

TEST_CASE("network parsing rejects malformed documents") {
  CHECK(kind_of([] { parse_network_text("{nope"); }) == Err::Input);
  CHECK(kind_of([] {
          parse_network_text(R"({"nodes": ["r","a"], "source": "r", "edges": [], "extra": 1})");
        }) == Err::Input);
  CHECK(kind_of([] {
          parse_network_text(
              R"({"nodes": ["r","a"], "source": "r",
                  "edges": [{"src":"r","dst":"a","weight":2}]})");
        }) == Err::Input);
  CHECK(kind_of([] { parse_network_text(R"({"nodes": ["r","a"], "edges": []})"); }) == Err::Input);
  CHECK(kind_of([] {
          parse_network_text(R"({"nodes": ["r", 7], "source": "r", "edges": []})");
        }) == Err::Input);
  CHECK(kind_of([] {
          parse_network_text(
              R"({"nodes": ["r","a"], "source": "r", "edges": [{"src":"r","dst":"a","cap":1.5}]})");
        }) == Err::Input);
  // Structural faults found by network validation keep their own kinds.
  CHECK(kind_of([] {
          parse_network_text(
              R"({"nodes": ["r","a"], "source": "r", "edges": [{"src":"r","dst":"a","cap":0}]})");
        }) == Err::BadCapacity);
}

TEST_CASE("table process parsing accepts numeric and string probabilities") {
  Network net = parse_network_text(kTwoLinkNet);
  ConfigProcess proc = parse_process_text(net, kCaseOneTable);
  const auto& table = std::get<ConfigTable>(proc);
  REQUIRE(table.masks.size() == 4);
  CHECK(table.masks[0] == 0b00);
  CHECK(table.masks[1] == 0b01);
  CHECK(table.masks[2] == 0b10);
  CHECK(table.masks[3] == 0b11);
  for (double p : table.probs) CHECK(p == 0.25);
}

TEST_CASE("table process parsing rejects bad rows") {
  Network net = parse_network_text(kTwoLinkNet);
  auto parse = [&](const std::string& text) { return [&net, text] { parse_process_text(net, text); }; };
  CHECK(kind_of(parse(R"({"type": "nope"})")) == Err::Input);
  CHECK(kind_of(parse(R"({"type": "table", "configs": []})")) == Err::Input);
  CHECK(kind_of(parse(
            R"({"type": "table", "configs": [{"on": [["r","a"],["r","a"]], "prob": 1}]})")) ==
        Err::Input);
  CHECK(kind_of(parse(R"({"type": "table", "configs": [{"on": [["a","b"]], "prob": 1}]})")) ==
        Err::Input);
  CHECK(kind_of(parse(R"({"type": "table", "configs": [{"on": [], "prob": 1.2}]})")) == Err::Input);
  CHECK(kind_of(parse(R"({"type": "table", "configs": [{"on": [], "prob": "x"}]})")) == Err::Input);
  CHECK(kind_of(parse(R"({"type": "table", "configs": [{"on": [], "prob": 1, "why": 0}]})")) ==
        Err::Input);
  // Probabilities that do not sum to 1 are a table-validation fault.
  CHECK(kind_of(parse(R"({"type": "table", "configs": [{"on": [], "prob": 0.5}]})")) == Err::Input);
}

TEST_CASE("iid process parsing covers scalar and per-edge forms") {
  Network net = parse_network_text(kTwoLinkNet);
  const auto scalar =
      std::get<IidLinkProcess>(parse_process_text(net, R"({"type": "iid", "prob": 0.5})"));
  REQUIRE(scalar.p.size() == 2);
  CHECK(scalar.p[0] == 0.5);
  CHECK(uniform_marginal(scalar));

  const auto per_edge = std::get<IidLinkProcess>(parse_process_text(net,
      R"({"type": "iid", "probs": [{"edge": ["r","b"], "prob": 0.25},
                                   {"edge": ["r","a"], "prob": "0.75"}]})"));
  CHECK(per_edge.p[0] == 0.75);
  CHECK(per_edge.p[1] == 0.25);

  auto parse = [&](const std::string& text) { return [&net, text] { parse_process_text(net, text); }; };
  CHECK(kind_of(parse(R"({"type": "iid"})")) == Err::Input);
  CHECK(kind_of(parse(R"({"type": "iid", "prob": 0.5, "probs": []})")) == Err::Input);
  CHECK(kind_of(parse(R"({"type": "iid", "probs": [{"edge": ["r","a"], "prob": 0.5}]})")) ==
        Err::Input);
  CHECK(kind_of(parse(
            R"({"type": "iid", "probs": [{"edge": ["r","a"], "prob": 0.5},
                                         {"edge": ["r","a"], "prob": 0.5}]})")) == Err::Input);
  CHECK(kind_of(parse(R"({"type": "iid", "prob": 0})")) == Err::Input);  // p must be positive
}

TEST_CASE("markov process parsing validates the chain") {
  Network net = parse_network_text(kTwoLinkNet);
  const auto proc = std::get<MarkovConfigProcess>(parse_process_text(net,
      R"({"type": "markov",
          "states": [[["r","a"]], [["r","b"]]],
          "transition": [[0.5, 0.5], ["0.5", 0.5]]})"));
  CHECK(proc.states == std::vector<EdgeMask>{0b01, 0b10});
  CHECK(proc.initial == 0);

  auto parse = [&](const std::string& text) { return [&net, text] { parse_process_text(net, text); }; };
  CHECK(kind_of(parse(
            R"({"type": "markov", "states": [[["r","a"]]], "transition": [[1]], "initial": 3})")) ==
        Err::Input);
  CHECK(kind_of(parse(
            R"({"type": "markov", "states": [[["r","a"]], [["r","b"]]],
                "transition": [[1, 0], [0, 1]]})")) == Err::NonErgodicChain);
  CHECK(kind_of(parse(
            R"({"type": "markov", "states": [[["r","a"]], [["r","b"]]],
                "transition": [[0.5, 0.5]]})")) == Err::Input);
}

TEST_CASE("capacity result serialization matches the documented shape") {
  Network net = parse_network_text(kTwoLinkNet);
  const auto table = std::get<ConfigTable>(parse_process_text(net, kCaseOneTable));
  json doc = capacity_result_json(net, compute_capacity(net, table));

  REQUIRE(doc.contains("lambda_star"));
  CHECK(doc["lambda_star"].get<double>() == doctest::Approx(0.375).epsilon(1e-9));
  REQUIRE(doc.contains("tight_nodes"));
  for (const auto& name : doc["tight_nodes"]) CHECK((name == "a" || name == "b"));
  REQUIRE(doc.contains("beta_star"));
  CHECK(doc["beta_star"].size() == 4);
  for (const auto& [sigma, rows] : doc["beta_star"].items()) {
    double total = 0.0;
    for (const auto& row : rows) {
      REQUIRE(row.size() == 2);
      CHECK(row[0].is_array());
      total += row[1].get<double>();
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(doc["edges"] == json::parse(R"([["r","a"],["r","b"]])"));
  CHECK(doc.size() == 4);
}

TEST_CASE("error lines are single-line JSON") {
  const std::string line = error_json("InputError", "bad \"thing\"");
  CHECK(line.find('\n') == std::string::npos);
  json parsed = json::parse(line);
  CHECK(parsed["error"] == "InputError");
  CHECK(parsed["message"] == "bad \"thing\"");
}

TEST_CASE("file loading failures are input errors") {
  CHECK(kind_of([] { load_json_file("/nonexistent/net.json"); }) == Err::Input);
}

TEST_CASE("simulation options parse with defaults and reject typos") {
  const json full = json::parse(R"({
    "policy": "piprime", "lambda": 0.25, "slots": 5000, "seed": 11,
    "warmup": 100, "lambda_design": 0.3, "update_prob": 0.8,
    "arrivals": "deterministic", "checks": "every-slot",
    "queue_stride": 10, "record_trace": true, "theta": 0.02,
    "match_limit": 500
  })");
  const SimConfig cfg = parse_sim_options(full);
  CHECK(cfg.policy == PolicyKind::MaxWeightDelayed);
  CHECK(cfg.lambda == doctest::Approx(0.25));
  CHECK(cfg.slots == 5000);
  CHECK(cfg.seed == 11);
  CHECK(cfg.warmup == 100);
  CHECK(cfg.lambda_design == doctest::Approx(0.3));
  CHECK(cfg.update_prob == doctest::Approx(0.8));
  CHECK(cfg.arrivals == ArrivalKind::Deterministic);
  CHECK(cfg.checks == CheckLevel::EverySlot);
  CHECK(cfg.queue_stride == 10);
  CHECK(cfg.record_trace);
  CHECK(cfg.stability_theta == doctest::Approx(0.02));
  CHECK(cfg.match_limit == 500);

  const json minimal = json::parse(
      R"({"policy": "pistar", "lambda": 0.1, "slots": 100, "seed": 1})");
  const SimConfig defaults = parse_sim_options(minimal);
  CHECK(defaults.warmup == -1);
  CHECK(defaults.update_prob == doctest::Approx(1.0));
  CHECK(defaults.arrivals == ArrivalKind::Poisson);
  CHECK(defaults.checks == CheckLevel::Sampled);
  CHECK(defaults.queue_stride == 1);
  CHECK_FALSE(defaults.record_trace);
  CHECK(defaults.match_limit == 0);

  json bad = minimal;
  bad["stride"] = 5;  // unknown key
  CHECK_THROWS_AS(parse_sim_options(bad), Error);
  bad = minimal;
  bad["record_trace"] = "yes";
  CHECK_THROWS_AS(parse_sim_options(bad), Error);
  bad = minimal;
  bad["seed"] = -3;
  CHECK_THROWS_AS(parse_sim_options(bad), Error);
  bad = minimal;
  bad["match_limit"] = 0;
  CHECK_THROWS_AS(parse_sim_options(bad), Error);
  bad = minimal;
  bad["policy"] = "greedy";
  CHECK_THROWS_AS(parse_sim_options(bad), Error);
}

TEST_CASE("sweep specs parse inline networks and enforce the process choice") {
  const json spec_doc = json::parse(R"({
    "network": {"nodes": ["r", "a"], "source": "r",
                "edges": [{"src": "r", "dst": "a"}]},
    "p_values": [0.4, 1.0],
    "lambdas": [0.1, 0.2, 0.3],
    "slots": 2000,
    "seed": 5
  })");
  const SweepSpec spec = parse_sweep_spec(spec_doc);
  CHECK(spec.net.node_count() == 2);
  CHECK_FALSE(spec.has_process);
  CHECK(spec.p_values == std::vector<double>{0.4, 1.0});
  CHECK(spec.lambdas.size() == 3);
  CHECK(spec.slots == 2000);
  CHECK(spec.seed == 5);
  CHECK(spec.policies == std::vector<PolicyKind>{PolicyKind::MaxWeight});
  CHECK(spec.replications == 1);
  CHECK(spec.arrivals == ArrivalKind::Poisson);
  CHECK(spec.checks == CheckLevel::Off);

  json fixed = spec_doc;
  fixed.erase("p_values");
  fixed["process"] = json::parse(R"({"type": "iid", "prob": 0.5})");
  fixed["policies"] = json::array({"pistar", "rand"});
  fixed["lambda_design"] = 0.2;
  fixed["replications"] = 4;
  const SweepSpec with_proc = parse_sweep_spec(fixed);
  CHECK(with_proc.has_process);
  CHECK(with_proc.policies.size() == 2);
  CHECK(with_proc.policies[1] == PolicyKind::Randomized);
  CHECK(with_proc.replications == 4);
  CHECK(with_proc.lambda_design == doctest::Approx(0.2));

  json both = fixed;
  both["p_values"] = json::array({0.5});
  CHECK_THROWS_AS(parse_sweep_spec(both), Error);
  json neither = spec_doc;
  neither.erase("p_values");
  CHECK_THROWS_AS(parse_sweep_spec(neither), Error);
  json empty_p = spec_doc;
  empty_p["p_values"] = json::array();
  CHECK_THROWS_AS(parse_sweep_spec(empty_p), Error);
  json empty_pol = spec_doc;
  empty_pol["policies"] = json::array();
  CHECK_THROWS_AS(parse_sweep_spec(empty_pol), Error);
  json typo = spec_doc;
  typo["lambda"] = 0.5;  // unknown key
  CHECK_THROWS_AS(parse_sweep_spec(typo), Error);
  CHECK_THROWS_AS(parse_sweep_spec_text("not json"), Error);
}

TEST_CASE("run reports serialize every section") {
  const Network net = parse_network_text(R"({
    "nodes": ["r", "a", "b"], "source": "r",
    "edges": [{"src": "r", "dst": "a"}, {"src": "a", "dst": "b"}]
  })");
  ConfigTable table;
  table.masks = {net.full_mask()};
  table.probs = {1.0};

  SimConfig cfg;
  cfg.policy = PolicyKind::MaxWeight;
  cfg.arrivals = ArrivalKind::Deterministic;
  cfg.lambda = 1.0;
  cfg.slots = 6;
  cfg.seed = 7;
  cfg.checks = CheckLevel::EverySlot;
  cfg.record_trace = true;
  const SimReport rep = run_sim(net, ConfigProcess{table}, cfg);

  const json doc = sim_report_json(net, cfg, rep);
  CHECK(doc["schema"] == 1);
  CHECK(doc["policy"] == "pistar");
  CHECK(doc["arrivals"] == "deterministic");
  CHECK(doc["slots"] == 6);
  CHECK(doc["total_arrivals"] == 6);
  CHECK(doc["nodes"] == json::array({"r", "a", "b"}));
  CHECK(doc["delivered"]["count"] == 2);
  CHECK(doc["delivered"]["per_node"] == json::array({6, 4, 2}));
  CHECK(doc["delay"]["mean"] == doctest::Approx(3.0));
  CHECK(doc["delays"] == json::array({2, 4}));
  CHECK(doc["queue"]["series"] == json::array({1, 2, 2, 3, 4, 4}));
  CHECK(doc["stability"]["verdict"] == "short");
  CHECK(doc["checks"]["slots_checked"] == 6);
  CHECK_FALSE(doc.contains("lambda_design"));  // not a randomized run
  const std::string hash = doc["trace_hash"].get<std::string>();
  CHECK(hash.substr(0, 2) == "0x");
  CHECK(hash.size() == 18);
  REQUIRE(doc["trace"].size() == 6);
  CHECK(doc["trace"][0] == "0x0000000000000001");
  CHECK(doc["trace"][1] == "0x0000000000000002");
}
