#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "kis/experiments.hpp"
#include "kis/trace_io.hpp"
#include "support.hpp"

using namespace kis;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kis_tests_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<Trace> sample_traces() {
  std::vector<Trace> out;
  for (auto a : {Algorithm::alg1, Algorithm::alg1v, Algorithm::alg2, Algorithm::is, Algorithm::naive,
                 Algorithm::alg1_over_alg2}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      RandomSchedule rs(s);
      out.push_back(run(make_instance(a, ModelConfig{4, 2, 2, s, 100000}, default_inputs(4)), rs));
    }
  }
  const auto setup = make_simulation(alg1_variant_inner(ModelConfig{4, 2, 2}), Partition::parse("1,2|3,4"), {5, 6});
  RandomSchedule rs(3);
  const Trace outer = run(setup.outer, rs);
  out.push_back(outer);
  out.push_back(extract_simulated_history(outer, setup).inner);
  return out;
}

}  // namespace

TEST_CASE("traces round-trip byte for byte") {
  for (const auto& tr : sample_traces()) {
    const std::string text = trace_to_string(tr);
    const Trace back = read_trace_string(text);
    REQUIRE(trace_to_string(back) == text);
    CHECK(back.events == tr.events);
    CHECK(back.outcomes == tr.outcomes);
    CHECK(back.config == tr.config);
    CHECK(reports_json(standard_checks(back)) == reports_json(standard_checks(tr)));
  }
}

TEST_CASE("trace files survive save and load") {
  const auto dir = scratch("io");
  const Trace tr = sample_traces().front();
  save_trace(dir / "t.jsonl", tr);
  CHECK(trace_to_string(load_trace(dir / "t.jsonl")) == trace_to_string(tr));
  CHECK_THROWS(load_trace(dir / "missing.jsonl"));
}

TEST_CASE("an empty trace file gives an empty trace with vacuous checks") {
  const Trace tr = read_trace_string("");
  CHECK(tr.events.empty());
  CHECK(tr.outcomes.empty());
  CHECK(all_passed(standard_checks(tr)));
}

TEST_CASE("malformed lines report their line number") {
  const std::string good = trace_to_string(sample_traces().front());
  std::istringstream in(good);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);

  try {
    read_trace_string(header + "\n" + first + "\n{not json\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    read_trace_string(header + "\n{\"step\":0,\"kind\":\"teleport\"}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    std::istringstream sched("{\"action\":\"step\",\"pid\":1}\n{\"action\":\"jump\"}\n");
    read_schedule(sched);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("schedules round-trip and replay to identical decisions") {
  const auto dir = scratch("replay");
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ModelConfig c{4, 2, 2, s, 100000};
    RandomSchedule rs(s);
    const Trace tr = run(make_instance(Algorithm::alg1, c, default_inputs(4)), rs);
    save_schedule(dir / "s.jsonl", to_choices(tr));
    const auto choices = load_schedule(dir / "s.jsonl");
    CHECK(choices == to_choices(tr));
    ReplaySchedule replay(choices);
    const Trace again = run(make_instance(Algorithm::alg1, c, default_inputs(4)), replay);
    CHECK(again.outcomes == tr.outcomes);
    CHECK(trace_to_string(again) == trace_to_string(tr));
  }
}

TEST_CASE("replay rejects a schedule that does not fit") {
  std::vector<ScheduledChoice> bogus{{Action::Kind::commit, {}, "kis", {ProcessId{1}}}};
  ReplaySchedule replay(bogus);
  CHECK_THROWS_AS(run(make_instance(Algorithm::alg1, ModelConfig{3, 1, 1}, default_inputs(3)), replay), ModelError);
}

TEST_CASE("n=3 exhaustive matrix records the exact maxima") {
  MatrixOptions opt;
  opt.n = 3;
  opt.exhaustive = true;
  opt.witness_dir = scratch("matrix3");
  const auto rep = run_matrix(opt);
  CHECK(rep.passed());
  CHECK(rep.cells.size() == 3);
  for (const auto& c : rep.cells) {
    CAPTURE(c.t);
    CAPTURE(c.k);
    CHECK(static_cast<int>(c.observed_max) == c.formula_x);
    REQUIRE(c.witness_path);
    const Trace w = load_trace(*c.witness_path);
    CHECK(w.distinct_decisions() == c.observed_max);
  }
}

TEST_CASE("matrix bounds never decrease along rows and columns") {
  MatrixOptions opt;
  opt.n = 11;
  opt.trials = 1;
  const auto rep = run_matrix(opt);
  CHECK(rep.cells.size() == 55);
  CHECK(rep.monotone());
  CHECK(rep.cell(5, 10).formula_x == 6);
  CHECK(rep.cell(1, 10).formula_x == 2);
}

TEST_CASE("same seed gives the same matrix report") {
  MatrixOptions opt;
  opt.n = 5;
  opt.trials = 40;
  opt.seed = 9;
  const auto a = run_matrix(opt);
  const auto b = run_matrix(opt);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.passed());
  opt.seed = 10;
  CHECK(run_matrix(opt).passed());
}

TEST_CASE("matrix argument errors") {
  MatrixOptions opt;
  opt.n = 2;
  CHECK_THROWS_AS(run_matrix(opt), ModelError);
  opt.n = 4;
  opt.trials = 0;
  CHECK_THROWS_AS(run_matrix(opt), ModelError);
}

TEST_CASE("blocking demonstration") {
  const auto blocked = run_blocking_demo(5, 3, 1, 20, 0);
  CHECK(blocked.expect_blocked);
  CHECK(blocked.passed());
  const auto free = run_blocking_demo(4, 1, 1, 20, 0);
  CHECK_FALSE(free.expect_blocked);
  CHECK(free.passed());
  CHECK(free.all_returned == 20);
}

TEST_CASE("equivalence suite") {
  SuiteOptions opt;
  opt.exhaustive = true;
  const auto rep = run_equivalence_suite(3, 1, 1, opt);
  CHECK(rep.passed());
  CHECK(rep.consensus_from_kis.max_distinct == 1);
  CHECK(rep.composed.max_distinct == 1);
  CHECK_THROWS_AS(run_equivalence_suite(4, 2, 2, opt), ModelError);
  CHECK_THROWS_AS(run_equivalence_suite(5, 2, 3, opt), ModelError);
}
