#include "dagcast/dagcast.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "capacity.hpp"
#include "connectivity.hpp"
#include "errors.hpp"
#include "fixtures.hpp"
#include "graph.hpp"
#include "json_io.hpp"
#include "sim.hpp"

struct dagcast_net {
  dagcast::Network net;
};

struct dagcast_process {
  dagcast::ConfigProcess proc;
};

namespace {

thread_local std::string g_error_name;
thread_local std::string g_error_message;

void clear_error() {
  g_error_name.clear();
  g_error_message.clear();
}

// Exceptions must not cross the library boundary; everything funnels into a
// status code plus the thread-local error slot.
template <typename F>
int guarded(F&& body) {
  clear_error();
  try {
    body();
    return DAGCAST_OK;
  } catch (const dagcast::Error& e) {
    g_error_name = dagcast::err_name(e.kind());
    g_error_message = e.what();
    return dagcast::err_exit_code(e.kind());
  } catch (const std::exception& e) {
    g_error_name = "InternalError";
    g_error_message = e.what();
    return DAGCAST_ERR_SOLVER;
  } catch (...) {
    g_error_name = "InternalError";
    g_error_message = "unknown failure";
    return DAGCAST_ERR_SOLVER;
  }
}

[[noreturn]] void reject(const std::string& msg) { dagcast::fail(dagcast::Err::Input, msg); }

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_required_json(const char* text, const char* what) {
  if (text == nullptr) reject(std::string(what) + " is null");
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) reject(std::string(what) + " is not valid JSON");
  return doc;
}

nlohmann::json run_capacity(const dagcast_net& net, const dagcast_process* proc,
                            const char* options_json) {
  std::string mode = "exact";
  double p = -1.0;
  std::size_t match_limit = dagcast::default_matching_limit();
  if (options_json != nullptr) {
    nlohmann::json opts = parse_required_json(options_json, "options");
    dagcast::require_keys(opts, "options", {"mode", "p", "match_limit"});
    if (auto it = opts.find("mode"); it != opts.end()) {
      if (!it->is_string()) reject("\"mode\" must be a string");
      mode = it->get<std::string>();
    }
    if (auto it = opts.find("p"); it != opts.end()) {
      if (!it->is_number()) reject("\"p\" must be a number");
      p = it->get<double>();
    }
    if (auto it = opts.find("match_limit"); it != opts.end()) {
      if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0)
        reject("\"match_limit\" must be a positive integer");
      match_limit = it->get<std::size_t>();
    }
  }

  if (mode == "exact") {
    if (proc == nullptr) reject("mode \"exact\" needs a configuration process");
    const dagcast::ConfigTable table = dagcast::stationary_distribution(net.net, proc->proc);
    return dagcast::capacity_result_json(net.net,
                                         dagcast::compute_capacity(net.net, table, match_limit));
  }
  if (mode == "static") {
    dagcast::ConfigTable all_on;
    all_on.masks.push_back(net.net.full_mask());
    all_on.probs.push_back(1.0);
    return dagcast::capacity_result_json(net.net,
                                         dagcast::compute_capacity(net.net, all_on, match_limit));
  }
  if (mode == "bounds") {
    if (p < 0.0) reject("mode \"bounds\" needs \"p\"");
    return dagcast::capacity_bounds_json(dagcast::capacity_bounds(net.net, p));
  }
  if (mode == "approx") {
    if (p < 0.0) reject("mode \"approx\" needs \"p\"");
    return dagcast::approx_capacity_json(net.net, dagcast::approx_capacity(net.net, p));
  }
  reject("unknown mode \"" + mode + "\"");
}

}  // namespace

extern "C" {

const char* dagcast_version(void) { return "0.1.0"; }

const char* dagcast_last_error_name(void) { return g_error_name.c_str(); }

const char* dagcast_last_error_message(void) { return g_error_message.c_str(); }

int dagcast_net_parse(const char* json_text, dagcast_net** out) {
  return guarded([&] {
    if (out == nullptr) reject("output handle is null");
    *out = nullptr;
    nlohmann::json doc = parse_required_json(json_text, "network");
    *out = new dagcast_net{dagcast::parse_network(doc)};
  });
}

void dagcast_net_free(dagcast_net* net) { delete net; }

int dagcast_net_node_count(const dagcast_net* net) {
  return net == nullptr ? -1 : net->net.node_count();
}

int dagcast_net_edge_count(const dagcast_net* net) {
  return net == nullptr ? -1 : net->net.edge_count();
}

int dagcast_process_parse(const dagcast_net* net, const char* json_text, dagcast_process** out) {
  return guarded([&] {
    if (out == nullptr) reject("output handle is null");
    *out = nullptr;
    if (net == nullptr) reject("network handle is null");
    nlohmann::json doc = parse_required_json(json_text, "process");
    *out = new dagcast_process{dagcast::parse_process(net->net, doc)};
  });
}

void dagcast_process_free(dagcast_process* proc) { delete proc; }

int dagcast_capacity_run(const dagcast_net* net, const dagcast_process* proc,
                         const char* options_json, char** out_json) {
  return guarded([&] {
    if (out_json == nullptr) reject("output string is null");
    *out_json = nullptr;
    if (net == nullptr) reject("network handle is null");
    *out_json = copy_out(run_capacity(*net, proc, options_json).dump());
  });
}

int dagcast_simulate_run(const dagcast_net* net, const dagcast_process* proc,
                         const char* options_json, char** out_json) {
  return guarded([&] {
    if (out_json == nullptr) reject("output string is null");
    *out_json = nullptr;
    if (net == nullptr) reject("network handle is null");
    if (proc == nullptr) reject("process handle is null");
    const dagcast::SimConfig cfg =
        dagcast::parse_sim_options(parse_required_json(options_json, "options"));
    const dagcast::SimReport rep = dagcast::run_sim(net->net, proc->proc, cfg);
    *out_json = copy_out(dagcast::sim_report_json(net->net, cfg, rep).dump());
  });
}

int dagcast_sweep_run(const char* spec_json, int jobs, char** out_csv) {
  return guarded([&] {
    if (out_csv == nullptr) reject("output string is null");
    *out_csv = nullptr;
    const dagcast::SweepSpec spec =
        dagcast::parse_sweep_spec(parse_required_json(spec_json, "sweep spec"));
    *out_csv = copy_out(dagcast::sweep_csv(dagcast::run_sweep(spec, jobs)));
  });
}

int dagcast_fixture_list(char** out_json) {
  return guarded([&] {
    if (out_json == nullptr) reject("output string is null");
    *out_json = nullptr;
    nlohmann::json list = nlohmann::json::array();
    for (const dagcast::Fixture& f : dagcast::fixtures())
      list.push_back({{"name", f.name}, {"kind", f.kind}, {"summary", f.summary}});
    *out_json = copy_out(list.dump());
  });
}

int dagcast_fixture_run(const char* name, char** out_json, char** out_csv) {
  return guarded([&] {
    if (out_json == nullptr) reject("output string is null");
    *out_json = nullptr;
    if (out_csv != nullptr) *out_csv = nullptr;
    if (name == nullptr) reject("fixture name is null");
    const dagcast::Fixture* f = dagcast::find_fixture(name);
    if (f == nullptr) reject("unknown fixture \"" + std::string(name) + "\"");
    std::string csv;
    const nlohmann::json doc = dagcast::run_fixture(*f, out_csv ? &csv : nullptr);
    *out_json = copy_out(doc.dump());
    if (out_csv != nullptr && !csv.empty()) *out_csv = copy_out(csv);
    if (!doc["pass"].get<bool>())
      dagcast::fail(dagcast::Err::InvariantViolation,
                    "fixture \"" + std::string(name) + "\" missed its expectation");
  });
}

void dagcast_string_free(char* s) { std::free(s); }

}  // extern "C"
