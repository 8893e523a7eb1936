// Command-line driver: single runs, exhaustive exploration, the agreement
// matrix, trace checking, the two-simulator construction and the demos.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kis/experiments.hpp"
#include "kis/trace_io.hpp"

using namespace kis;

namespace {

struct Common {
  int n = 3;
  int t = 1;
  int k = 1;
  std::uint64_t seed = 0;
  std::string algo = "alg1";
  std::string schedule = "random";
  std::string out;
  std::string inputs;
  std::size_t trials = 1000;
  std::size_t step_bound = 100000;
};

std::vector<std::int64_t> parse_inputs(const std::string& text, std::size_t expect) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  if (out.size() != expect) {
    throw ModelError("expected " + std::to_string(expect) + " comma-separated inputs, got '" + text + "'");
  }
  return out;
}

void write_json(const std::string& path, const Json& j) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << '\n';
}

std::unique_ptr<ScheduleSource> make_schedule(const std::string& spec, std::uint64_t seed) {
  if (spec == "random") return std::make_unique<RandomSchedule>(seed);
  if (spec == "roundrobin") return std::make_unique<RoundRobinSchedule>();
  if (spec.rfind("replay:", 0) == 0) return std::make_unique<ReplaySchedule>(load_schedule(spec.substr(7)));
  throw ModelError("unknown schedule '" + spec + "' (random, roundrobin, replay:<file>)");
}

int cmd_run(const Common& c, const std::string& schedule_out) {
  ModelConfig config{c.n, c.t, c.k, c.seed, c.step_bound};
  const auto algo = parse_algorithm(c.algo);
  const auto inputs = c.inputs.empty() ? default_inputs(c.n) : parse_inputs(c.inputs, static_cast<std::size_t>(c.n));
  World world = make_instance(algo, config, inputs);
  auto sched = make_schedule(c.schedule, c.seed);
  const Trace tr = run(std::move(world), *sched);
  if (c.out.empty()) {
    write_trace(std::cout, tr);
  } else {
    save_trace(c.out, tr);
  }
  if (!schedule_out.empty()) save_schedule(schedule_out, to_choices(tr));
  const auto reports = standard_checks(tr);
  std::cerr << "decisions: " << tr.distinct_decisions() << " distinct"
            << (tr.truncated ? ", truncated" : "") << '\n';
  for (const auto& r : reports) std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.to_json().dump() << '\n';
  return all_passed(reports) && !tr.truncated ? 0 : 1;
}

int cmd_explore(const Common& c, bool interleavings) {
  ModelConfig config{c.n, c.t, c.k, c.seed, c.step_bound};
  const auto algo = parse_algorithm(c.algo);
  const World world = make_instance(algo, config, default_inputs(c.n));
  if (interleavings) {
    std::size_t traces = 0;
    std::size_t failures = 0;
    auto stats = enumerate_runs(world, ExploreOptions{Exploration::interleavings, c.step_bound}, [&](const Trace& tr) {
      ++traces;
      if (!all_passed(standard_checks(tr))) ++failures;
      return true;
    });
    std::cout << "interleavings: " << traces << ", failing: " << failures << ", truncated: " << stats.truncated << '\n';
    return failures == 0 && stats.truncated == 0 ? 0 : 1;
  }
  SuiteOptions o;
  o.exhaustive = true;
  const SuiteResult res = run_suite(world, o);
  std::cout << res.to_json().dump(2) << '\n';
  write_json(c.out, res.to_json());
  if (res.first_failure) {
    std::cerr << "first failing trace:\n";
    write_trace(std::cerr, *res.first_failure);
  }
  return res.passed() ? 0 : 1;
}

int cmd_matrix(const Common& c, const std::string& witness_dir) {
  MatrixOptions o;
  o.n = c.n;
  o.trials = c.trials;
  o.seed = c.seed;
  o.algorithm = parse_algorithm(c.algo);
  if (c.schedule == "exhaustive") {
    o.exhaustive = true;
  } else if (c.schedule != "random") {
    throw ModelError("matrix schedule must be random or exhaustive");
  }
  if (c.n <= 4) o.exhaustive = true;
  if (!witness_dir.empty()) o.witness_dir = witness_dir;
  const MatrixReport rep = run_matrix(o);
  std::cout << rep.table();
  write_json(c.out, rep.to_json());
  return rep.passed() ? 0 : 1;
}

int cmd_check(const std::string& trace_path, std::optional<int> k) {
  Trace tr = load_trace(trace_path);
  if (k) tr.config.k = *k;
  const auto reports = standard_checks(tr);
  Json j = Json::object();
  j["trace"] = trace_path;
  j["passed"] = all_passed(reports) && !tr.truncated;
  j["reports"] = reports_json(reports);
  std::cout << j.dump(2) << '\n';
  return j["passed"].get<bool>() ? 0 : 1;
}

int cmd_simulate(const Common& c, const std::string& inner_algo, const std::string& partition_text) {
  if (inner_algo != "alg1v" && inner_algo != "alg1_variant") {
    throw ModelError("the simulation runs k-IS-only protocols; supported: alg1v");
  }
  const ModelConfig inner{c.n, c.t, c.k, c.seed, c.step_bound};
  const Partition part = partition_text.empty() ? Partition::standard(c.n, c.t) : Partition::parse(partition_text);
  const auto in = c.inputs.empty() ? std::vector<std::int64_t>{0, 1} : parse_inputs(c.inputs, 2);
  const std::array<std::int64_t, 2> inputs{in[0], in[1]};

  if (c.schedule == "exhaustive") {
    SuiteOptions o;
    o.exhaustive = true;
    const SimulationReport rep = run_simulation_suite(inner, part, inputs, o);
    std::cout << rep.to_json().dump(2) << '\n';
    write_json(c.out.empty() ? "" : c.out + ".report.json", rep.to_json());
    return rep.passed() ? 0 : 1;
  }
  const SimulationSetup setup = make_simulation(alg1_variant_inner(inner), part, inputs, c.seed, c.step_bound);
  auto sched = make_schedule(c.schedule, c.seed);
  const Trace outer = run(setup.outer, *sched);
  const SimulatedRun sim = extract_simulated_history(outer, setup);
  if (!c.out.empty()) {
    save_trace(c.out + ".outer.jsonl", outer);
    save_trace(c.out + ".inner.jsonl", sim.inner);
  } else {
    std::cout << "# outer\n";
    write_trace(std::cout, outer);
    std::cout << "# inner\n";
    write_trace(std::cout, sim.inner);
  }
  bool ok = !outer.truncated;
  for (const auto& name : setup.inner.object_names) {
    auto r = check_is(sim.inner, name, c.k);
    auto r1 = check_theorem1(sim.inner, name, c.n, c.k);
    ok = ok && r.passed() && r1.passed();
    std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.to_json().dump() << '\n';
    std::cerr << (r1.passed() ? "PASS " : "FAIL ") << r1.to_json().dump() << '\n';
  }
  for (const auto& l : sim.lemma1) {
    std::cerr << "lemma1 " << l.object << ": response=" << l.has_response << " max_inside=" << l.max_inside
              << (l.witness ? " ok" : " MISSING") << '\n';
    ok = ok && l.witness;
  }
  return ok ? 0 : 1;
}

int cmd_blocking(const Common& c, std::size_t seeds) {
  const BlockingReport rep = run_blocking_demo(c.n, c.t, c.k, seeds, c.seed);
  std::cout << "naive k-IS attempt n=" << c.n << " t=" << c.t << " k=" << c.k << " with " << c.t
            << " initial crashes: " << rep.all_blocked << "/" << rep.runs << " runs blocked, " << rep.all_returned
            << "/" << rep.runs << " returned (expected " << (rep.expect_blocked ? "blocked" : "returned") << ")\n";
  write_json(c.out, rep.to_json());
  return rep.passed() ? 0 : 1;
}

int cmd_equivalence(const Common& c) {
  SuiteOptions o;
  o.exhaustive = c.schedule == "exhaustive";
  o.trials = c.trials;
  o.seed = c.seed;
  const EquivalenceReport rep = run_equivalence_suite(c.n, c.t, c.k, o);
  std::cout << rep.to_json().dump(2) << '\n';
  write_json(c.out, rep.to_json());
  return rep.passed() ? 0 : 1;
}

void add_model(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "number of processes");
  app->add_option("--t", c.t, "crash bound");
  app->add_option("--k", c.k, "k of the k-IS object");
  app->add_option("--seed", c.seed, "seed");
  app->add_option("--step-bound", c.step_bound, "scheduler steps before a run is truncated");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-immediate-snapshot simulator and experiments"};
  app.require_subcommand(1);
  Common c;

  std::string schedule_out;
  auto* run_cmd = app.add_subcommand("run", "one run; writes the trace as JSONL");
  add_model(run_cmd, c);
  run_cmd->add_option("--algo", c.algo, "alg1|alg1v|alg2|naive|is|kis|alg1-over-alg2");
  run_cmd->add_option("--schedule", c.schedule, "random|roundrobin|replay:<file>");
  run_cmd->add_option("--inputs", c.inputs, "comma-separated inputs, one per process");
  run_cmd->add_option("--out", c.out, "trace file (stdout when absent)");
  run_cmd->add_option("--schedule-out", schedule_out, "write the schedule for replay");

  bool interleavings = false;
  auto* explore_cmd = app.add_subcommand("explore", "exhaustive exploration with every check");
  add_model(explore_cmd, c);
  explore_cmd->add_option("--algo", c.algo, "algorithm tag");
  explore_cmd->add_option("--schedule", c.schedule, "exhaustive (default)");
  explore_cmd->add_flag("--interleavings", interleavings, "enumerate interleavings instead of states");
  explore_cmd->add_option("--out", c.out, "JSON report");

  std::string witness_dir;
  auto* matrix_cmd = app.add_subcommand("matrix", "distinct decisions of alg1 for every 1<=t<=k<=n-1");
  matrix_cmd->add_option("--n", c.n, "number of processes");
  matrix_cmd->add_option("--seed", c.seed, "seed");
  matrix_cmd->add_option("--trials", c.trials, "random trials per cell");
  matrix_cmd->add_option("--algo", c.algo, "alg1 or alg1v");
  matrix_cmd->add_option("--schedule", c.schedule, "random|exhaustive (exhaustive forced for n<=4)");
  matrix_cmd->add_option("--out", c.out, "JSON report");
  matrix_cmd->add_option("--witness-dir", witness_dir, "persist the max-decision trace of every cell");

  std::string trace_path;
  std::optional<int> check_k;
  auto* check_cmd = app.add_subcommand("check", "check a trace file");
  check_cmd->add_option("trace", trace_path, "trace JSONL")->required();
  check_cmd->add_option("--k", check_k, "override k from the trace header");

  std::string inner_algo = "alg1v";
  std::string partition;
  auto* sim_cmd = app.add_subcommand("simulate", "two simulators running an n-process k-IS protocol");
  add_model(sim_cmd, c);
  sim_cmd->add_option("--inner-algo", inner_algo, "alg1v");
  sim_cmd->add_option("--partition", partition, "A0|A1|D, e.g. 1,2|3,4|");
  sim_cmd->add_option("--inputs", c.inputs, "inputs of Q0,Q1");
  sim_cmd->add_option("--schedule", c.schedule, "random|roundrobin|exhaustive|replay:<file>");
  sim_cmd->add_option("--out", c.out, "output prefix");

  std::size_t seeds = 100;
  auto* block_cmd = app.add_subcommand("demo-blocking", "naive read/write k-IS under t initial crashes");
  add_model(block_cmd, c);
  block_cmd->add_option("--seeds", seeds, "number of seeded runs");
  block_cmd->add_option("--out", c.out, "JSON report");

  auto* eq_cmd = app.add_subcommand("equivalence", "k-IS from consensus and back");
  add_model(eq_cmd, c);
  eq_cmd->add_option("--trials", c.trials, "random trials per direction");
  eq_cmd->add_option("--schedule", c.schedule, "random|exhaustive");
  eq_cmd->add_option("--out", c.out, "JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(c, schedule_out);
    if (*explore_cmd) return cmd_explore(c, interleavings);
    if (*matrix_cmd) return cmd_matrix(c, witness_dir);
    if (*check_cmd) return cmd_check(trace_path, check_k);
    if (*sim_cmd) return cmd_simulate(c, inner_algo, partition);
    if (*block_cmd) return cmd_blocking(c, seeds);
    if (*eq_cmd) return cmd_equivalence(c);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
