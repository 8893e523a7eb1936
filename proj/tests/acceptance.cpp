// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "kis/experiments.hpp"
#include "kis/trace_io.hpp"
#include "support.hpp"

using namespace kis;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Result()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!r.pass) ++failures;
  std::printf("%s %s: %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str(), secs);
  std::fflush(stdout);
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kis_acceptance_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

SuiteOptions exhaustive() {
  SuiteOptions o;
  o.exhaustive = true;
  return o;
}

SuiteOptions random_trials(std::size_t trials, std::uint64_t seed) {
  SuiteOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

TraceCheck kis_checks(const std::string& label) {
  return [label](const Trace& tr) {
    const auto& c = tr.config;
    return std::vector<CheckReport>{check_is(tr, label, c.k), check_theorem1(tr, label, c.n, c.k)};
  };
}

Result table_exhaustive() {
  std::ostringstream out;
  bool ok = true;
  for (int n = 3; n <= 4; ++n) {
    MatrixOptions opt;
    opt.n = n;
    opt.exhaustive = true;
    opt.witness_dir = scratch("matrix" + std::to_string(n));
    const auto rep = run_matrix(opt);
    ok = ok && rep.passed();
    out << "n=" << n << (rep.passed() ? " ok" : " VIOLATION") << " cells=" << rep.cells.size() << "; ";
    if (n != 4) continue;
    const auto& cell = rep.cell(2, 2);
    const Trace witness = load_trace(*cell.witness_path);
    ReplaySchedule replay(load_schedule(std::filesystem::path(*cell.witness_path).replace_extension(".schedule.jsonl")));
    const Trace again = run(make_instance(Algorithm::alg1, witness.config, default_inputs(4)), replay);
    const bool tight = cell.observed_max == 2 && witness.distinct_decisions() == 2 &&
                       again.outcomes == witness.outcomes && check_xsa(witness, "alg1", 2).passed() &&
                       !check_xsa(witness, "alg1", 1).verdict("agreement").pass;
    ok = ok && tight;
    out << "(4,2,2) witness with " << witness.distinct_decisions() << " decisions"
        << (tight ? ", replayed" : ", NOT REPRODUCED");
  }
  return {ok, out.str()};
}

Result table_sampled() {
  MatrixOptions opt;
  opt.n = 11;
  opt.trials = 1000;
  opt.seed = 2024;
  const auto rep = run_matrix(opt);
  const auto& c510 = rep.cell(5, 10);
  const auto& c11 = rep.cell(1, 1);
  std::size_t min_trials = opt.trials, tight = 0;
  for (const auto& c : rep.cells) {
    min_trials = std::min(min_trials, c.trials);
    if (static_cast<int>(c.observed_max) == c.formula_x) ++tight;
  }
  const bool ok = rep.passed() && rep.cells.size() == 55 && min_trials >= 1000 && c510.observed_max <= 6 &&
                  c11.observed_max == 1;
  std::ostringstream out;
  out << rep.cells.size() << " cells x " << min_trials << " trials, violations="
      << std::count_if(rep.cells.begin(), rep.cells.end(), [](const MatrixCell& c) { return !c.pass; })
      << ", (5,10) max=" << c510.observed_max << "/6, (1,1) max=" << c11.observed_max
      << ", cells reaching the bound=" << tight;
  return {ok, out.str()};
}

Result kis_suite() {
  bool ok = true;
  std::size_t histories = 0;
  std::ostringstream out;
  for (auto a : {Algorithm::kis, Algorithm::alg2}) {
    const std::string label(top_level_object(a));
    for (int t = 1; t <= 2; ++t) {
      for (int k = t; k <= 2; ++k) {
        const auto res = run_suite(make_instance(a, ModelConfig{3, t, k, 0, 100000}, default_inputs(3)), exhaustive(),
                                   kis_checks(label));
        histories += res.traces;
        if (!res.passed()) {
          ok = false;
          out << label << " n=3 (" << t << "," << k << ") failed; ";
        }
      }
    }
    for (int t = 1; t <= 4; ++t) {
      for (int k = t; k <= 4; ++k) {
        const auto res = run_suite(make_instance(a, ModelConfig{5, t, k, 0, 100000}, default_inputs(5)),
                                   random_trials(1000, 100 * t + k), kis_checks(label));
        histories += res.traces;
        if (!res.passed() || res.traces < 1000) {
          ok = false;
          out << label << " n=5 (" << t << "," << k << ") failed; ";
        }
      }
    }
  }
  out << "oracle and alg2, n=3 exhaustive + n=5 1000 trials per cell, " << histories << " histories";
  return {ok, out.str()};
}

Result wait_free_is() {
  bool ok = true;
  std::size_t traces = 0;
  for (int t = 0; t <= 2; ++t) {
    const auto res = run_suite(make_instance(Algorithm::is, ModelConfig{3, t, 2, 0, 100000}, default_inputs(3)),
                               exhaustive(), [](const Trace& tr) {
                                 return std::vector<CheckReport>{check_is(tr, "is", tr.config.n - 1)};
                               });
    traces += res.traces;
    ok = ok && res.passed();
  }
  return {ok, "n=3, t=0..2, " + std::to_string(traces) + " terminal states, all terminate"};
}

Result equivalence() {
  const auto rep = run_equivalence_suite(5, 2, 2, random_trials(1000, 77));
  const bool ok = rep.passed() && rep.kis_from_consensus.traces >= 1000 && rep.consensus_from_kis.traces >= 1000 &&
                  rep.consensus_from_kis.max_distinct <= 1 && rep.composed.max_distinct <= 1;
  std::ostringstream out;
  out << "n=5 t=2 k=2: alg2 " << rep.kis_from_consensus.traces << " histories, " << rep.kis_from_consensus.failures
      << " failures; alg1 max decisions " << rep.consensus_from_kis.max_distinct << " over "
      << rep.consensus_from_kis.traces << " trials; composed max " << rep.composed.max_distinct;
  return {ok, out.str()};
}

Result blocking() {
  const auto rep = run_blocking_demo(4, 2, 1, 100, 5);
  std::ostringstream out;
  out << "(4,2,1) with 2 initial crashes: " << rep.all_blocked << "/" << rep.runs << " runs blocked";
  return {rep.passed() && rep.expect_blocked && rep.runs == 100 && rep.all_blocked == 100, out.str()};
}

Result simulation() {
  const auto rep =
      run_simulation_suite(ModelConfig{4, 2, 2, 0, 100000}, Partition::parse("1,2|3,4"), {5, 6}, exhaustive());
  std::ostringstream out;
  out << "n=4 t=k=2 over alg1v: " << rep.outer_traces << " outer states (" << rep.outer_with_crash
      << " with a simulator crash), inner failures=" << rep.inner_failures
      << ", lemma-1 gaps=" << rep.lemma1_failures << ", objects with responses=" << rep.objects_with_response;
  return {rep.passed() && rep.outer_with_crash > 0 && rep.objects_with_response > 0, out.str()};
}

Result negative_corpus() {
  const std::set<std::string> wanted{"self_inclusion", "validity", "containment", "immediacy", "output_size", "theorem1"};
  std::set<std::string> rejected;
  for (const auto& c : kis::test::negative_corpus()) {
    const auto rep = kis::test::run_negative(c);
    const auto& v = rep.verdict(c.property);
    if (!v.pass && !v.witness.is_null()) rejected.insert(c.property);
  }
  std::string names;
  for (const auto& r : rejected) names += (names.empty() ? "" : ",") + r;
  return {rejected == wanted, std::to_string(rejected.size()) + "/6 rejected with witnesses: " + names};
}

}  // namespace

int main() {
  criterion("table1_exhaustive_n3_n4", table_exhaustive);
  criterion("table1_sampled_n11", table_sampled);
  criterion("kis_property_suite", kis_suite);
  criterion("wait_free_immediate_snapshot", wait_free_is);
  criterion("consensus_kis_equivalence", equivalence);
  criterion("naive_kis_blocking", blocking);
  criterion("two_simulator_construction", simulation);
  criterion("checker_negative_corpus", negative_corpus);
  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures);
  return failures == 0 ? 0 : 1;
}
