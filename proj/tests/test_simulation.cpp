#include <set>

#include "doctest.h"
#include "kis/experiments.hpp"
#include "kis/trace_io.hpp"
#include "support.hpp"

using namespace kis;
using kis::test::ScriptedSchedule;

namespace {

std::vector<ProcessId> pids(std::initializer_list<int> xs) {
  std::vector<ProcessId> out;
  for (int x : xs) out.push_back(ProcessId{x});
  return out;
}

SimulationSetup setup_4_2_2() {
  return make_simulation(alg1_variant_inner(ModelConfig{4, 2, 2, 0, 100000}), Partition::parse("1,2|3,4"), {5, 6});
}

View flatten(const View& outer) {
  View out;
  for (const auto& p : outer) out = out.united(p.value.as_view());
  return out;
}

std::vector<View> inner_views(const Trace& inner, const std::string& obj) {
  std::vector<View> out;
  for (const auto& op : extract_history(inner, obj).ops) {
    if (op.output) out.push_back(op.output->as_view());
  }
  return out;
}

}  // namespace

TEST_CASE("partitions") {
  const Partition p = Partition::parse("1,2|3,4|");
  CHECK(p.a0 == pids({1, 2}));
  CHECK(p.a1 == pids({3, 4}));
  CHECK(p.d.empty());
  CHECK(Partition::parse(p.to_string()).to_string() == p.to_string());
  CHECK_NOTHROW(p.validate(4));
  CHECK_THROWS_AS(p.validate(5), ModelError);
  CHECK_THROWS_AS(Partition::parse("1,2|3").validate(3), ModelError);
  CHECK_THROWS_AS(Partition::parse("1|1").validate(2), ModelError);
  CHECK_THROWS_AS(Partition::parse("1;2"), ModelError);

  const Partition half = Partition::standard(4, 2);
  CHECK(half.a0.size() == 2);
  CHECK(half.d.empty());
  const Partition wide = Partition::standard(4, 3);
  CHECK(wide.a0.size() == 1);
  CHECK(wide.a1.size() == 1);
  CHECK(wide.d.size() == 2);
  CHECK_NOTHROW(wide.validate(4));
  CHECK_THROWS_AS(Partition::standard(5, 2), ModelError);
}

TEST_CASE("simulation setup rejects partitions that exceed the crash bound") {
  CHECK_THROWS_AS(make_simulation(alg1_variant_inner(ModelConfig{4, 1, 1}), Partition::parse("1,2|3,4"), {1, 2}),
                  ModelError);
  CHECK_THROWS_AS(make_simulation(alg1_variant_inner(ModelConfig{4, 2, 2}), Partition::parse("1|2|3,4"), {1, 2}),
                  ModelError);
}

TEST_CASE("with the other simulator crashed, both members share one 2-pair view") {
  const auto setup = setup_4_2_2();
  ScriptedSchedule sched({Action::crash(ProcessId{2})});
  const Trace outer = run(setup.outer, sched);
  CHECK(outer.outcome(ProcessId{1}).status == ProcessStatus::returned);
  const auto sim = extract_simulated_history(outer, setup);
  const auto views = inner_views(sim.inner, "kis1");
  REQUIRE(views.size() == 2);
  CHECK(views[0] == views[1]);
  CHECK(views[0].size() == 2);
  CHECK(views[0].contains(ProcessId{1}));
  CHECK(views[0].contains(ProcessId{2}));
  CHECK(check_is(sim.inner, "kis1", 2).passed());
  CHECK(check_is(sim.inner, "kis2", 2).passed());
  for (const auto& l : sim.lemma1) CHECK(l.witness);
  CHECK(sim.inner.outcome(ProcessId{3}).status == ProcessStatus::crashed);
}

TEST_CASE("the mediating 1-IS orders the two simulators' proposals") {
  const auto setup = setup_4_2_2();
  World w = setup.outer;
  bool split = false;
  enumerate_runs(w, ExploreOptions{Exploration::states, 100000}, [&](const Trace& tr) {
    std::vector<View> got;
    for (const auto& e : tr.events) {
      if (e.kind == EventKind::respond && e.object == "IS/kis1") got.push_back(flatten(view_from_json(e.ret)));
    }
    for (const auto& v : got) REQUIRE((v.size() == 2 || v.size() == 4));
    if (got.size() == 2) {
      REQUIRE((got[0].subset_of(got[1]) || got[1].subset_of(got[0])));
      if (got[0].size() != got[1].size()) split = true;
    }
    return true;
  });
  CHECK(split);
}

TEST_CASE("2t > n degenerates to one member per simulator") {
  const Partition p = Partition::standard(4, 3);
  SuiteOptions opt;
  opt.exhaustive = true;
  const auto rep = run_simulation_suite(ModelConfig{4, 3, 3, 0, 100000}, p, {5, 6}, opt);
  CHECK(rep.passed());
  CHECK(rep.objects_with_response > 0);

  // Each one-member simulator hits the snapshot trigger on its first operation.
  const auto setup = make_simulation(alg1_variant_inner(ModelConfig{4, 3, 3}), p, {5, 6});
  RoundRobinSchedule rr;
  const Trace outer = run(setup.outer, rr);
  std::size_t invokes = 0;
  for (const auto& e : outer.events) {
    if (e.kind == EventKind::invoke && e.object == "IS/kis1") {
      ++invokes;
      CHECK(view_from_json(e.args).size() == 1);
    }
  }
  CHECK(invokes == 2);
}

TEST_CASE("exhaustive simulation at n=4, t=k=2") {
  SuiteOptions opt;
  opt.exhaustive = true;
  const auto rep = run_simulation_suite(ModelConfig{4, 2, 2, 0, 100000}, Partition::parse("1,2|3,4"), {5, 6}, opt);
  CHECK(rep.passed());
  CHECK(rep.outer_traces > 100);
}

TEST_CASE("simulated objects without invocations need no witness") {
  const auto setup = setup_4_2_2();
  World w = setup.outer;
  // Stop before anyone reaches the second object.
  w.apply(Action::crash(ProcessId{1}));
  w.finish(false);
  const auto sim = extract_simulated_history(w.trace(), setup);
  for (const auto& l : sim.lemma1) {
    CHECK_FALSE(l.has_response);
    CHECK(l.witness);
  }
  CHECK(check_is(sim.inner, "kis2", 2).passed());
}

TEST_CASE("max_inside counts overlapping operations") {
  Trace tr = kis::test::hand_trace(3, 1, {{1, 1, kis::test::view_of({{1, 1}, {2, 2}})}, {2, 2, std::nullopt, true}});
  CHECK(max_inside(tr, "kis") == 2);
}

TEST_CASE("random simulation runs are reproducible") {
  const auto setup = setup_4_2_2();
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomSchedule a(s), b(s);
    CHECK(trace_to_string(run(setup.outer, a)) == trace_to_string(run(setup.outer, b)));
  }
}
