#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dagcast/dagcast.h"

namespace {

using nlohmann::json;

void print_error_line(const std::string& name, const std::string& message) {
  std::cerr << json{{"error", name}, {"message", message}}.dump() << "\n";
}

// Report the library's thread-local error as one JSON line and pass the
// status through as the exit code.
int report_api_error(int status) {
  print_error_line(dagcast_last_error_name(), dagcast_last_error_message());
  return status;
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text << "\n";
  if (!out) {
    print_error_line("InputError", "cannot write file: " + out_path);
    return DAGCAST_ERR_INPUT;
  }
  return 0;
}

// RAII over the C handles so every exit path frees them.
struct NetHandle {
  dagcast_net* ptr = nullptr;
  ~NetHandle() { dagcast_net_free(ptr); }
};
struct ProcessHandle {
  dagcast_process* ptr = nullptr;
  ~ProcessHandle() { dagcast_process_free(ptr); }
};
struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { dagcast_string_free(ptr); }
};

struct CapacityArgs {
  std::string net_path;
  std::string process_path;
  bool static_mode = false;
  double bounds_p = -1.0;
  double approx_p = -1.0;
  std::uint64_t match_limit = 0;
  std::string out_path;
};

// Loads --net (and --process when given) into handles; nonzero on failure.
int load_inputs(const std::string& net_path, const std::string& process_path, NetHandle& net,
                ProcessHandle& proc) {
  const auto net_text = slurp(net_path);
  if (!net_text) {
    print_error_line("InputError", "cannot open file: " + net_path);
    return DAGCAST_ERR_INPUT;
  }
  if (int rc = dagcast_net_parse(net_text->c_str(), &net.ptr); rc != 0)
    return report_api_error(rc);
  if (!process_path.empty()) {
    const auto proc_text = slurp(process_path);
    if (!proc_text) {
      print_error_line("InputError", "cannot open file: " + process_path);
      return DAGCAST_ERR_INPUT;
    }
    if (int rc = dagcast_process_parse(net.ptr, proc_text->c_str(), &proc.ptr); rc != 0)
      return report_api_error(rc);
  }
  return 0;
}

int run_capacity(const CapacityArgs& args) {
  NetHandle net;
  ProcessHandle proc;
  if (int rc = load_inputs(args.net_path, args.process_path, net, proc); rc != 0) return rc;

  json opts = json::object();
  if (args.static_mode) {
    opts["mode"] = "static";
  } else if (args.bounds_p >= 0.0) {
    opts["mode"] = "bounds";
    opts["p"] = args.bounds_p;
  } else if (args.approx_p >= 0.0) {
    opts["mode"] = "approx";
    opts["p"] = args.approx_p;
  } else {
    opts["mode"] = "exact";
    if (proc.ptr == nullptr) {
      print_error_line("InputError",
                       "capacity needs --process, or one of --static/--bounds/--approx");
      return DAGCAST_ERR_INPUT;
    }
  }
  if (args.match_limit > 0) opts["match_limit"] = args.match_limit;

  StringHandle result;
  const std::string opts_text = opts.dump();
  if (int rc = dagcast_capacity_run(net.ptr, proc.ptr, opts_text.c_str(), &result.ptr); rc != 0)
    return report_api_error(rc);
  return write_output(json::parse(result.ptr).dump(2), args.out_path);
}

struct SimulateArgs {
  std::string net_path;
  std::string process_path;
  std::string policy;
  double lambda = 0.0;
  std::int64_t slots = 0;
  std::uint64_t seed = 0;
  std::int64_t warmup = -1;
  double lambda_design = -1.0;
  double update_prob = 1.0;
  std::string arrivals = "poisson";
  std::string checks = "sampled";
  std::int64_t queue_stride = 1;
  bool record_trace = false;
  double theta = 0.01;
  std::uint64_t match_limit = 0;
  std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
  NetHandle net;
  ProcessHandle proc;
  if (int rc = load_inputs(args.net_path, args.process_path, net, proc); rc != 0) return rc;

  json opts{{"policy", args.policy}, {"lambda", args.lambda},   {"slots", args.slots},
            {"seed", args.seed},     {"arrivals", args.arrivals}, {"checks", args.checks},
            {"update_prob", args.update_prob}, {"queue_stride", args.queue_stride},
            {"record_trace", args.record_trace}, {"theta", args.theta}};
  if (args.warmup >= 0) opts["warmup"] = args.warmup;
  if (args.lambda_design >= 0.0) opts["lambda_design"] = args.lambda_design;
  if (args.match_limit > 0) opts["match_limit"] = args.match_limit;

  StringHandle result;
  const std::string opts_text = opts.dump();
  if (int rc = dagcast_simulate_run(net.ptr, proc.ptr, opts_text.c_str(), &result.ptr); rc != 0)
    return report_api_error(rc);
  return write_output(json::parse(result.ptr).dump(2), args.out_path);
}

struct SweepArgs {
  std::string spec_path;
  int jobs = 1;
  std::string out_path;
};

int run_sweep_cmd(const SweepArgs& args) {
  const auto spec_text = slurp(args.spec_path);
  if (!spec_text) {
    print_error_line("InputError", "cannot open file: " + args.spec_path);
    return DAGCAST_ERR_INPUT;
  }
  StringHandle csv;
  if (int rc = dagcast_sweep_run(spec_text->c_str(), args.jobs, &csv.ptr); rc != 0)
    return report_api_error(rc);
  // CSV already ends with a newline per row; write it verbatim.
  if (args.out_path.empty()) {
    std::cout << csv.ptr;
    return 0;
  }
  std::ofstream out(args.out_path, std::ios::binary);
  out << csv.ptr;
  if (!out) {
    print_error_line("InputError", "cannot write file: " + args.out_path);
    return DAGCAST_ERR_INPUT;
  }
  return 0;
}

int run_fixture_list() {
  StringHandle list;
  if (int rc = dagcast_fixture_list(&list.ptr); rc != 0) return report_api_error(rc);
  std::cout << json::parse(list.ptr).dump(2) << "\n";
  return 0;
}

int run_fixture(const std::string& name, const std::string& out_path) {
  StringHandle result;
  StringHandle csv;
  const int rc = dagcast_fixture_run(name.c_str(), &result.ptr, &csv.ptr);
  if (result.ptr == nullptr) return report_api_error(rc);
  if (!out_path.empty() && csv.ptr != nullptr) {
    std::ofstream out(out_path, std::ios::binary);
    out << csv.ptr;
    if (!out) {
      print_error_line("InputError", "cannot write file: " + out_path);
      return DAGCAST_ERR_INPUT;
    }
  }
  std::cout << json::parse(result.ptr).dump(2) << "\n";
  if (rc != 0) print_error_line(dagcast_last_error_name(), dagcast_last_error_message());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"broadcast capacity and scheduling for time-varying DAG networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dagcast_version()));

  CapacityArgs cap_args;
  CLI::App* cap = app.add_subcommand("capacity", "compute broadcast capacity");
  cap->add_option("--net", cap_args.net_path, "network JSON file")->required();
  cap->add_option("--process", cap_args.process_path, "configuration process JSON file");
  auto* flag_static = cap->add_flag("--static", cap_args.static_mode, "all edges always ON");
  auto* opt_bounds =
      cap->add_option("--bounds", cap_args.bounds_p, "sandwich bounds for uniform ON probability p");
  auto* opt_approx =
      cap->add_option("--approx", cap_args.approx_p, "p-scaled static value with certificate");
  cap->add_option("--match-limit", cap_args.match_limit, "activation enumeration guard");
  cap->add_option("--out", cap_args.out_path, "write the result here instead of stdout");
  flag_static->excludes(opt_bounds)->excludes(opt_approx);
  opt_bounds->excludes(opt_approx);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "run one slotted scheduling experiment");
  sim->add_option("--net", sim_args.net_path, "network JSON file")->required();
  sim->add_option("--process", sim_args.process_path, "configuration process JSON file")
      ->required();
  sim->add_option("--policy", sim_args.policy, "pistar, piprime, or rand")->required();
  sim->add_option("--lambda", sim_args.lambda, "arrival rate, packets per slot")->required();
  sim->add_option("--slots", sim_args.slots, "horizon in slots")->required();
  sim->add_option("--seed", sim_args.seed, "master RNG seed")->required();
  sim->add_option("--warmup", sim_args.warmup, "slots excluded from delay stats (default T/10)");
  sim->add_option("--lambda-design", sim_args.lambda_design,
                  "target rate for the randomized policy");
  sim->add_option("--update-prob", sim_args.update_prob,
                  "counter-exchange probability per ON link (piprime)");
  sim->add_option("--arrivals", sim_args.arrivals, "poisson or deterministic");
  sim->add_option("--check-invariants", sim_args.checks, "off, sampled, or every-slot");
  sim->add_option("--queue-stride", sim_args.queue_stride, "thinning of the queue series");
  sim->add_flag("--record-trace", sim_args.record_trace, "keep per-slot activations");
  sim->add_option("--theta", sim_args.theta, "stability slope threshold factor");
  sim->add_option("--match-limit", sim_args.match_limit, "activation enumeration guard");
  sim->add_option("--out", sim_args.out_path, "write the report here instead of stdout");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep from a spec file");
  sweep->add_option("--spec", sweep_args.spec_path, "sweep specification JSON file")->required();
  sweep->add_option("--jobs", sweep_args.jobs, "worker threads");
  sweep->add_option("--out", sweep_args.out_path, "write the CSV here instead of stdout");

  CLI::App* fixtures = app.add_subcommand("fixtures", "bundled instances with pinned results");
  fixtures->require_subcommand(1);
  CLI::App* fx_list = fixtures->add_subcommand("list", "names and summaries");
  std::string fixture_name;
  std::string fixture_out;
  CLI::App* fx_run = fixtures->add_subcommand("run", "replay one fixture and check it");
  fx_run->add_option("name", fixture_name, "fixture name")->required();
  fx_run->add_option("--out", fixture_out, "write a sweep fixture's CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error_line("InputError", e.what());
    return DAGCAST_ERR_INPUT;
  }

  if (cap->parsed()) return run_capacity(cap_args);
  if (sim->parsed()) return run_simulate(sim_args);
  if (sweep->parsed()) return run_sweep_cmd(sweep_args);
  if (fixtures->parsed()) {
    if (fx_list->parsed()) return run_fixture_list();
    if (fx_run->parsed()) return run_fixture(fixture_name, fixture_out);
  }
  return 0;
}
