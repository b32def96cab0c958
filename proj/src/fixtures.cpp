#include "fixtures.hpp"

#include <cmath>

#include "capacity.hpp"
#include "connectivity.hpp"
#include "json_io.hpp"
#include "sim.hpp"

namespace dagcast {

namespace {

constexpr double kTolerance = 1e-6;

const char* kTwoLinkNet = R"({
  "nodes": ["r", "a", "b"],
  "source": "r",
  "edges": [{"src": "r", "dst": "a"}, {"src": "r", "dst": "b"}]
})";

// Two unit links that are ON independently with probability 1/2 each slot.
const char* kTwoLinkIndependent = R"({
  "type": "table",
  "configs": [
    {"on": [], "prob": 0.25},
    {"on": [["r", "a"]], "prob": 0.25},
    {"on": [["r", "b"]], "prob": 0.25},
    {"on": [["r", "a"], ["r", "b"]], "prob": 0.25}
  ]
})";

// Both links rise and fall together.
const char* kTwoLinkTogether = R"({
  "type": "table",
  "configs": [
    {"on": [], "prob": 0.5},
    {"on": [["r", "a"], ["r", "b"]], "prob": 0.5}
  ]
})";

// Exactly one link ON per slot, never both.
const char* kTwoLinkAlternating = R"({
  "type": "table",
  "configs": [
    {"on": [["r", "a"]], "prob": 0.5},
    {"on": [["r", "b"]], "prob": 0.5}
  ]
})";

const char* kGridNet = R"({
  "nodes": ["r", "a", "b", "c", "d", "e", "f", "g", "h"],
  "source": "r",
  "edges": [
    {"src": "r", "dst": "a"}, {"src": "a", "dst": "b"},
    {"src": "r", "dst": "c"}, {"src": "a", "dst": "d"},
    {"src": "b", "dst": "e"}, {"src": "c", "dst": "d"},
    {"src": "d", "dst": "e"}, {"src": "c", "dst": "f"},
    {"src": "d", "dst": "g"}, {"src": "e", "dst": "h"},
    {"src": "f", "dst": "g"}, {"src": "g", "dst": "h"}
  ]
})";

const char* kChainNet = R"({
  "nodes": ["r", "a", "b"],
  "source": "r",
  "edges": [{"src": "r", "dst": "a"}, {"src": "a", "dst": "b"}]
})";

const char* kDiamondNet = R"({
  "nodes": ["r", "a", "b", "t"],
  "source": "r",
  "edges": [
    {"src": "r", "dst": "a"}, {"src": "r", "dst": "b"},
    {"src": "a", "dst": "t"}, {"src": "b", "dst": "t"}
  ]
})";

// Delay-versus-rate curves on the grid: three link reliabilities, twelve
// rates each. Short horizon; the acceptance experiments rerun this shape at
// full length.
const char* kGridSweep = R"({
  "network": {
    "nodes": ["r", "a", "b", "c", "d", "e", "f", "g", "h"],
    "source": "r",
    "edges": [
      {"src": "r", "dst": "a"}, {"src": "a", "dst": "b"},
      {"src": "r", "dst": "c"}, {"src": "a", "dst": "d"},
      {"src": "b", "dst": "e"}, {"src": "c", "dst": "d"},
      {"src": "d", "dst": "e"}, {"src": "c", "dst": "f"},
      {"src": "d", "dst": "g"}, {"src": "e", "dst": "h"},
      {"src": "f", "dst": "g"}, {"src": "g", "dst": "h"}
    ]
  },
  "p_values": [0.4, 0.6, 1.0],
  "lambdas": [0.025, 0.05, 0.075, 0.1, 0.125, 0.15,
              0.175, 0.2, 0.225, 0.25, 0.275, 0.3],
  "slots": 2000,
  "seed": 7,
  "checks": "off"
})";

std::vector<Fixture> build_fixtures() {
  std::vector<Fixture> out;

  Fixture f;
  f.name = "twolink-case1";
  f.summary = "two links, independently ON half the time; capacity 3/8";
  f.kind = "capacity";
  f.mode = "exact";
  f.network_json = kTwoLinkNet;
  f.process_json = kTwoLinkIndependent;
  f.expected_lambda = 0.375;
  out.push_back(f);

  f = Fixture{};
  f.name = "twolink-case2";
  f.summary = "two links, perfectly correlated; capacity 1/4";
  f.kind = "capacity";
  f.mode = "exact";
  f.network_json = kTwoLinkNet;
  f.process_json = kTwoLinkTogether;
  f.expected_lambda = 0.25;
  out.push_back(f);

  f = Fixture{};
  f.name = "twolink-case3";
  f.summary = "two links, exactly one ON per slot; capacity 1/2";
  f.kind = "capacity";
  f.mode = "exact";
  f.network_json = kTwoLinkNet;
  f.process_json = kTwoLinkAlternating;
  f.expected_lambda = 0.5;
  out.push_back(f);

  f = Fixture{};
  f.name = "grid3x3";
  f.summary = "3x3 directed grid, all links always ON; capacity 2/5";
  f.kind = "capacity";
  f.mode = "static";
  f.network_json = kGridNet;
  f.expected_lambda = 0.4;
  out.push_back(f);

  f = Fixture{};
  f.name = "chain3";
  f.summary = "three-node chain, all links always ON; capacity 1/2";
  f.kind = "capacity";
  f.mode = "static";
  f.network_json = kChainNet;
  f.expected_lambda = 0.5;
  out.push_back(f);

  f = Fixture{};
  f.name = "diamond";
  f.summary = "two disjoint two-hop paths, always ON; capacity 1/2";
  f.kind = "capacity";
  f.mode = "static";
  f.network_json = kDiamondNet;
  f.expected_lambda = 0.5;
  out.push_back(f);

  f = Fixture{};
  f.name = "grid-sweep";
  f.summary = "grid delay curves: 12 rates x 3 link reliabilities";
  f.kind = "sweep";
  f.sweep_json = kGridSweep;
  f.expected_rows = 36;
  out.push_back(f);

  return out;
}

}  // namespace

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> all = build_fixtures();
  return all;
}

const Fixture* find_fixture(const std::string& name) {
  for (const Fixture& f : fixtures()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

nlohmann::json run_fixture(const Fixture& f, std::string* csv_out) {
  nlohmann::json doc{{"name", f.name}, {"kind", f.kind}};
  if (f.kind == "capacity") {
    const Network net = parse_network_text(f.network_json);
    CapacityResult res;
    if (f.mode == "static") {
      res = compute_static_capacity(net);
    } else {
      const ConfigProcess proc = parse_process_text(net, f.process_json);
      res = compute_capacity(net, stationary_distribution(net, proc));
    }
    doc["mode"] = f.mode;
    doc["expected"] = f.expected_lambda;
    doc["lambda_star"] = res.lambda_star;
    doc["tolerance"] = kTolerance;
    doc["pass"] = std::abs(res.lambda_star - f.expected_lambda) <= kTolerance;
    return doc;
  }
  const SweepSpec spec = parse_sweep_spec_text(f.sweep_json);
  const std::vector<SweepRow> rows = run_sweep(spec, 1);
  bool all_ok = true;
  for (const SweepRow& row : rows) all_ok = all_ok && row.ok;
  doc["rows"] = rows.size();
  doc["expected_rows"] = f.expected_rows;
  doc["all_ok"] = all_ok;
  doc["pass"] = all_ok && rows.size() == f.expected_rows;
  if (csv_out) *csv_out = sweep_csv(rows);
  return doc;
}

}  // namespace dagcast
