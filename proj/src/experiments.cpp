#include "kis/experiments.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "kis/trace_io.hpp"

namespace kis {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t i) {
  return mix64(seed ^ mix64(salt * 0x9e3779b97f4a7c15ULL + i));
}

namespace {

std::set<std::string> operation_labels(const Trace& trace) {
  std::set<std::string> out;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::invoke || e.object.empty()) continue;
    if (e.args.is_object() && e.args.contains("as")) continue;
    out.insert(e.object);
  }
  return out;
}

int alg1_x(const ModelConfig& c) {
  if (1 <= c.t && c.t <= c.k && c.k <= c.n - 1) return xsa_bound(c.n, c.t, c.k);
  return c.n;
}

}  // namespace

std::vector<CheckReport> standard_checks(const Trace& trace) {
  const auto& c = trace.config;
  std::vector<CheckReport> out;
  for (const auto& label : operation_labels(trace)) {
    if (label == "kis" || label == "kis1" || label == "kis2" || label == "alg2") {
      out.push_back(check_is(trace, label, c.k));
      out.push_back(check_theorem1(trace, label, c.n, c.k));
    } else if (label == "is") {
      out.push_back(check_is(trace, label, c.n - 1));
    } else if (label == "cs") {
      out.push_back(check_consensus_linearizable(trace, label));
    } else if (label == "alg1") {
      out.push_back(check_xsa(trace, label, alg1_x(c)));
    } else if (label == "alg1v") {
      out.push_back(check_xsa(trace, label, c.k >= 1 ? alg1_variant_bound(c.n, c.k) : 1));
    }
  }
  return out;
}

bool all_passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed(); });
}

Json reports_json(const std::vector<CheckReport>& reports) {
  Json j = Json::array();
  for (const auto& r : reports) j.push_back(r.to_json());
  return j;
}

Json SuiteResult::to_json() const {
  Json j = Json::object();
  j["traces"] = traces;
  j["failures"] = failures;
  j["truncated"] = truncated;
  j["max_distinct_decisions"] = max_distinct;
  j["passed"] = passed();
  if (first_failure) j["first_failure"] = reports_json(first_failure_reports);
  return j;
}

SuiteResult run_suite(const World& world, const SuiteOptions& options, const TraceCheck& check) {
  SuiteResult res;
  auto visit = [&](const Trace& tr) {
    ++res.traces;
    if (tr.truncated) ++res.truncated;
    const std::size_t d = tr.distinct_decisions();
    if (d > res.max_distinct || !res.max_witness) {
      res.max_distinct = std::max(res.max_distinct, d);
      if (d == res.max_distinct) res.max_witness = tr;
    }
    auto reports = check(tr);
    if (!all_passed(reports)) {
      if (res.failures++ == 0) {
        res.first_failure = tr;
        res.first_failure_reports = std::move(reports);
      }
    }
  };
  if (options.exhaustive) {
    enumerate_runs(world, ExploreOptions{Exploration::states, world.config().step_bound}, [&](const Trace& tr) {
      visit(tr);
      return true;
    });
  } else {
    for (std::size_t i = 0; i < options.trials; ++i) {
      RandomScheduleOptions ro;
      ro.crashes = options.crashes;
      RandomSchedule sched(trial_seed(options.seed, 0, i), ro);
      visit(run(world, sched));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

bool MatrixReport::passed() const {
  return !cells.empty() && std::all_of(cells.begin(), cells.end(), [](const MatrixCell& c) { return c.pass; });
}

const MatrixCell& MatrixReport::cell(int t, int k) const {
  for (const auto& c : cells) {
    if (c.t == t && c.k == k) return c;
  }
  throw ModelError("no matrix cell (" + std::to_string(t) + "," + std::to_string(k) + ")");
}

bool MatrixReport::monotone() const {
  for (const auto& a : cells) {
    for (const auto& b : cells) {
      if (a.t <= b.t && a.k <= b.k && a.formula_x > b.formula_x) return false;
    }
  }
  return true;
}

Json MatrixReport::to_json() const {
  Json j = Json::object();
  j["n"] = n;
  j["algorithm"] = algorithm;
  j["mode"] = mode;
  j["seed"] = seed;
  j["passed"] = passed();
  j["monotone"] = monotone();
  Json cs = Json::array();
  for (const auto& c : cells) {
    Json e = Json::object();
    e["t"] = c.t;
    e["k"] = c.k;
    e["formula_x"] = c.formula_x;
    e["observed_max_distinct"] = c.observed_max;
    e["trials"] = c.trials;
    e["invalid"] = c.invalid;
    e["truncated"] = c.truncated;
    e["witness_trace_path"] = c.witness_path ? Json(*c.witness_path) : Json();
    e["witness_seed"] = c.witness_seed ? Json(*c.witness_seed) : Json();
    e["verdict"] = c.pass ? "pass" : "fail";
    cs.push_back(std::move(e));
  }
  j["cells"] = std::move(cs);
  return j;
}

std::string MatrixReport::table() const {
  std::ostringstream os;
  os << algorithm << " n=" << n << " (" << mode << "), cell = observed/formula\n";
  os << "t\\k ";
  for (int k = 1; k <= n - 1; ++k) os << std::setw(6) << k;
  os << '\n';
  for (int t = 1; t <= n - 1; ++t) {
    os << std::setw(3) << t << ' ';
    for (int k = 1; k <= n - 1; ++k) {
      if (k < t) {
        os << std::setw(6) << "";
        continue;
      }
      const auto& c = cell(t, k);
      std::string s = std::to_string(c.observed_max) + "/" + std::to_string(c.formula_x) + (c.pass ? "" : "!");
      os << std::setw(6) << s;
    }
    os << '\n';
  }
  os << (passed() ? "all cells within the bound" : "BOUND VIOLATED") << '\n';
  return os.str();
}

namespace {

struct Tally {
  std::size_t max = 0;
  std::size_t invalid = 0;
  std::size_t truncated = 0;
  std::size_t trials = 0;
};

bool valid_outcomes(const Trace& tr, const std::vector<std::int64_t>& inputs) {
  if (tr.truncated) return false;
  for (const auto& o : tr.outcomes) {
    if (o.status == ProcessStatus::blocked || o.status == ProcessStatus::running) return false;
    if (o.status == ProcessStatus::returned) {
      if (!o.value || !o.value->is_int()) return false;
      if (std::find(inputs.begin(), inputs.end(), o.value->as_int()) == inputs.end()) return false;
    }
  }
  return true;
}

void persist(const std::filesystem::path& dir, const std::string& stem, const Trace& tr, MatrixCell& cell) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + ".jsonl");
  save_trace(path, tr);
  save_schedule(dir / (stem + ".schedule.jsonl"), to_choices(tr));
  cell.witness_path = path.string();
}

}  // namespace

MatrixReport run_matrix(const MatrixOptions& options) {
  const int n = options.n;
  if (n < 3) throw ModelError("matrix needs n >= 3");
  if (!options.exhaustive && options.trials == 0) throw ModelError("matrix needs at least one trial");
  MatrixReport rep;
  rep.n = n;
  rep.algorithm = std::string(algorithm_tag(options.algorithm));
  rep.mode = options.exhaustive ? "exhaustive" : "random";
  rep.seed = options.seed;
  const auto inputs = default_inputs(n);

  for (int t = 1; t <= n - 1; ++t) {
    for (int k = t; k <= n - 1; ++k) {
      MatrixCell cell;
      cell.t = t;
      cell.k = k;
      cell.formula_x = options.algorithm == Algorithm::alg1v ? alg1_variant_bound(n, k) : xsa_bound(n, t, k);
      const ModelConfig config{n, t, k, options.seed, 100000};
      World world = make_instance(options.algorithm, config, inputs);
      Tally tally;
      std::optional<Trace> witness;
      const std::string stem = "cell_t" + std::to_string(t) + "_k" + std::to_string(k);

      if (options.exhaustive) {
        enumerate_runs(world, ExploreOptions{Exploration::states, config.step_bound}, [&](const Trace& tr) {
          ++tally.trials;
          if (tr.truncated) ++tally.truncated;
          if (!valid_outcomes(tr, inputs)) ++tally.invalid;
          const std::size_t d = tr.distinct_decisions();
          if (!witness || d > tally.max) {
            tally.max = std::max(tally.max, d);
            witness = tr;
          }
          return true;
        });
      } else {
        world.set_recording(false);
        const std::uint64_t salt = static_cast<std::uint64_t>(t) * 1000 + static_cast<std::uint64_t>(k);
        for (std::size_t i = 0; i < options.trials; ++i) {
          const std::uint64_t s = trial_seed(options.seed, salt, i);
          RandomScheduleOptions ro;
          ro.crashes = options.crashes;
          RandomSchedule sched(s, ro);
          const Trace tr = run(world, sched);
          ++tally.trials;
          if (tr.truncated) ++tally.truncated;
          if (!valid_outcomes(tr, inputs)) ++tally.invalid;
          const std::size_t d = tr.distinct_decisions();
          if (!cell.witness_seed || d > tally.max) {
            tally.max = std::max(tally.max, d);
            cell.witness_seed = s;
          }
        }
      }
      cell.observed_max = tally.max;
      cell.trials = tally.trials;
      cell.invalid = tally.invalid;
      cell.truncated = tally.truncated;
      cell.pass = tally.trials > 0 && tally.invalid == 0 && tally.truncated == 0 &&
                  static_cast<int>(tally.max) <= cell.formula_x;

      const bool keep = options.witness_dir.has_value() || !cell.pass;
      if (keep && (witness || cell.witness_seed)) {
        if (!witness) {
          World replay = make_instance(options.algorithm, config, inputs);
          RandomScheduleOptions ro;
          ro.crashes = options.crashes;
          RandomSchedule sched(*cell.witness_seed, ro);
          witness = run(replay, sched);
        }
        persist(options.witness_dir.value_or(std::filesystem::path("witnesses")), stem, *witness, cell);
      }
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

bool BlockingReport::passed() const {
  if (runs == 0 || truncated > 0) return false;
  return expect_blocked ? all_blocked == runs : all_returned == runs;
}

Json BlockingReport::to_json() const {
  Json j = Json::object();
  j["n"] = n;
  j["t"] = t;
  j["k"] = k;
  j["expect_blocked"] = expect_blocked;
  j["runs"] = runs;
  j["all_blocked"] = all_blocked;
  j["all_returned"] = all_returned;
  j["truncated"] = truncated;
  j["passed"] = passed();
  return j;
}

BlockingReport run_blocking_demo(int n, int t, int k, std::size_t seeds, std::uint64_t seed) {
  const ModelConfig config{n, t, k, seed, 100000};
  config.validate_crash_model();
  if (k < 1) throw ModelError("blocking demo needs k >= 1");
  BlockingReport rep;
  rep.n = n;
  rep.t = t;
  rep.k = k;
  rep.expect_blocked = t > k;
  const World world = make_instance(Algorithm::naive, config, default_inputs(n));
  for (std::size_t i = 0; i < seeds; ++i) {
    RandomScheduleOptions ro;
    ro.initial_crashes = t;
    RandomSchedule sched(seed + i, ro);
    Trace tr = run(world, sched);
    ++rep.runs;
    if (tr.truncated) ++rep.truncated;
    bool blocked = true;
    bool returned = true;
    for (const auto& o : tr.outcomes) {
      if (o.status == ProcessStatus::crashed) continue;
      blocked = blocked && o.status == ProcessStatus::blocked;
      returned = returned && o.status == ProcessStatus::returned;
    }
    if (blocked && !tr.truncated) ++rep.all_blocked;
    if (returned) ++rep.all_returned;
    if (!rep.sample) rep.sample = std::move(tr);
  }
  return rep;
}

// ---------------------------------------------------------------------------

Json EquivalenceReport::to_json() const {
  Json j = Json::object();
  j["n"] = n;
  j["t"] = t;
  j["k"] = k;
  j["kis_from_consensus"] = kis_from_consensus.to_json();
  j["consensus_from_kis"] = consensus_from_kis.to_json();
  j["composed"] = composed.to_json();
  j["passed"] = passed();
  return j;
}

EquivalenceReport run_equivalence_suite(int n, int t, int k, const SuiteOptions& options) {
  if (!(0 < t && 2 * t < n && t <= k && k <= n - 1 - t)) {
    throw ModelError("outside the equivalence zone 0 < t < n/2, t <= k <= n-1-t");
  }
  const ModelConfig config{n, t, k, options.seed, 100000};
  config.validate_crash_model();
  const auto inputs = default_inputs(n);
  EquivalenceReport rep;
  rep.n = n;
  rep.t = t;
  rep.k = k;

  rep.kis_from_consensus = run_suite(make_instance(Algorithm::alg2, config, inputs), options);

  auto single_valued = [](const std::string& top) {
    return [top](const Trace& tr) {
      auto reports = standard_checks(tr);
      reports.push_back(check_xsa(tr, top, 1));
      return reports;
    };
  };
  SuiteOptions o2 = options;
  o2.seed = trial_seed(options.seed, 2, 0);
  rep.consensus_from_kis = run_suite(make_instance(Algorithm::alg1, config, inputs), o2, single_valued("alg1"));
  SuiteOptions o3 = options;
  o3.seed = trial_seed(options.seed, 3, 0);
  rep.composed = run_suite(make_instance(Algorithm::alg1_over_alg2, config, inputs), o3, single_valued("alg1"));
  return rep;
}

// ---------------------------------------------------------------------------

Json SimulationReport::to_json() const {
  Json j = Json::object();
  j["n"] = n;
  j["t"] = t;
  j["k"] = k;
  j["partition"] = partition;
  j["outer_traces"] = outer_traces;
  j["outer_truncated"] = outer_truncated;
  j["outer_with_crash"] = outer_with_crash;
  j["inner_failures"] = inner_failures;
  j["lemma1_failures"] = lemma1_failures;
  j["objects_with_response"] = objects_with_response;
  j["q_decision_violations"] = q_decision_violations;
  j["passed"] = passed();
  if (first_failure) j["first_failure"] = first_failure_reports;
  return j;
}

SimulationReport run_simulation_suite(const ModelConfig& inner, const Partition& partition,
                                      std::array<std::int64_t, 2> inputs, const SuiteOptions& options) {
  const SimulationSetup setup = make_simulation(alg1_variant_inner(inner), partition, inputs, options.seed);
  SimulationReport rep;
  rep.n = inner.n;
  rep.t = inner.t;
  rep.k = inner.k;
  rep.partition = partition.to_string();
  const int bound = alg1_variant_bound(inner.n, inner.k);

  auto visit = [&](const Trace& outer) {
    ++rep.outer_traces;
    if (outer.truncated) ++rep.outer_truncated;
    if (std::any_of(outer.events.begin(), outer.events.end(), [](const Event& e) { return e.kind == EventKind::crash; })) {
      ++rep.outer_with_crash;
    }
    const SimulatedRun run = extract_simulated_history(outer, setup);
    std::vector<CheckReport> reports;
    for (const auto& name : setup.inner.object_names) {
      reports.push_back(check_is(run.inner, name, inner.k));
      reports.push_back(check_theorem1(run.inner, name, inner.n, inner.k));
    }
    bool lemma_ok = true;
    for (const auto& l : run.lemma1) {
      if (l.has_response) ++rep.objects_with_response;
      if (!l.witness) {
        ++rep.lemma1_failures;
        lemma_ok = false;
      }
    }
    // Q-level decisions: inputs of the simulators, within the inner bound.
    bool q_ok = static_cast<int>(outer.distinct_decisions()) <= bound;
    for (const auto& v : outer.decisions()) {
      q_ok = q_ok && v.is_int() && (v.as_int() == inputs[0] || v.as_int() == inputs[1]);
    }
    if (!q_ok) ++rep.q_decision_violations;
    const bool ok = all_passed(reports);
    if (!ok) ++rep.inner_failures;
    if ((!ok || !lemma_ok || !q_ok) && !rep.first_failure) {
      rep.first_failure = outer;
      rep.first_failure_reports = reports_json(reports);
    }
  };

  if (options.exhaustive) {
    enumerate_runs(setup.outer, ExploreOptions{Exploration::states, setup.outer.config().step_bound},
                   [&](const Trace& tr) {
                     visit(tr);
                     return true;
                   });
  } else {
    for (std::size_t i = 0; i < options.trials; ++i) {
      RandomScheduleOptions ro;
      ro.crashes = options.crashes;
      RandomSchedule sched(trial_seed(options.seed, 7, i), ro);
      visit(run(setup.outer, sched));
    }
  }
  return rep;
}

}  // namespace kis
