#include <algorithm>

#include "doctest.h"
#include "kis/experiments.hpp"
#include "support.hpp"

using namespace kis;
using kis::test::ScriptedSchedule;
using kis::test::view_of;

namespace {

const auto never_crashed = [](ProcessId) { return false; };

std::vector<ProcessId> pids(std::initializer_list<int> xs) {
  std::vector<ProcessId> out;
  for (int x : xs) out.push_back(ProcessId{x});
  return out;
}

class ProposeProgram : public ClonableProgram<ProposeProgram> {
 public:
  ProposeProgram(ObjectRef<ConsensusOracle> cs, Value v) : cs_(cs), v_(std::move(v)) {}
  void step(StepContext& ctx) override { ctx.finish(ctx.propose(cs_, v_)); }
  void hash_into(StateHasher&) const override {}

 private:
  ObjectRef<ConsensusOracle> cs_;
  Value v_;
};

World consensus_world(int n, int t) {
  World w(ModelConfig{n, t, 0, 0, 1000});
  auto cs = w.add_object("cs", ConsensusOracle{});
  for (int p = 1; p <= n; ++p) w.add_process(std::make_unique<ProposeProgram>(cs, Value(p * 11)));
  return w;
}

}  // namespace

TEST_CASE("oracle invocations wait for a commit") {
  KisOracle o(3, 1);
  o.invoke(ProcessId{1}, 10);
  CHECK(o.pending().size() == 1);
  CHECK(o.pending()[0] == Pair{ProcessId{1}, 10});
  CHECK(o.released().empty());
  CHECK_FALSE(o.can_commit_some());

  o.invoke(ProcessId{2}, 20);
  CHECK(o.released().empty());
  CHECK_FALSE(o.can_commit(pids({1})));
  CHECK(o.can_commit(pids({1, 2})));
  CHECK_THROWS_AS(o.invoke(ProcessId{2}, 21), ModelError);
}

TEST_CASE("oracle commits release cumulative views") {
  KisOracle o(3, 1);
  o.invoke(ProcessId{1}, 10);
  o.invoke(ProcessId{2}, 20);
  o.invoke(ProcessId{3}, 30);
  const auto first = o.commit(pids({1, 2}), never_crashed);
  REQUIRE(first.size() == 2);
  for (const auto& [p, v] : first) CHECK(v == view_of({{1, 10}, {2, 20}}));
  const auto second = o.commit(pids({3}), never_crashed);
  REQUIRE(second.size() == 1);
  CHECK(second[0].second == view_of({{1, 10}, {2, 20}, {3, 30}}));
  CHECK(o.classes().size() == 2);
  CHECK(o.pending().empty());
}

TEST_CASE("oracle with k=2 lets a single pair through") {
  KisOracle o(3, 2);
  o.invoke(ProcessId{1}, 10);
  const auto r = o.commit(pids({1}), never_crashed);
  REQUIRE(r.size() == 1);
  CHECK(r[0].second == view_of({{1, 10}}));
}

TEST_CASE("oracle rejects bad batches") {
  KisOracle o(3, 2);
  o.invoke(ProcessId{1}, 10);
  CHECK_THROWS_AS(o.commit({}, never_crashed), ModelError);
  CHECK_THROWS_AS(o.commit(pids({2}), never_crashed), ModelError);
  CHECK_THROWS_AS(KisOracle(3, 3), ModelError);
}

TEST_CASE("crashed pending invocations stay committable but release nothing") {
  KisOracle o(3, 1);
  o.invoke(ProcessId{1}, 10);
  o.invoke(ProcessId{2}, 20);
  const auto r = o.commit(pids({1, 2}), [](ProcessId p) { return p.index == 2; });
  REQUIRE(r.size() == 1);
  CHECK(r[0].first.index == 1);
  CHECK(r[0].second == view_of({{1, 10}, {2, 20}}));
}

TEST_CASE("feasible batches are exactly the gated subsets") {
  KisOracle o(4, 2);
  for (int p = 1; p <= 3; ++p) o.invoke(ProcessId{p}, p);
  const auto batches = o.feasible_batches();
  // Non-empty subsets of {1,2,3} with at least two elements.
  CHECK(batches.size() == 4);
  for (const auto& b : batches) CHECK(b.size() >= 2);
}

TEST_CASE("oracle histories have disjoint classes and cumulative views") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const int n = 5, k = 1 + static_cast<int>(s % 4);
    World w = make_instance(Algorithm::kis, ModelConfig{n, k, k, s, 10000}, default_inputs(n));
    RandomSchedule rs(s);
    const Trace tr = run(w, rs);
    std::vector<int> members;
    View acc;
    for (const auto& e : tr.events) {
      if (e.kind != EventKind::commit_batch) continue;
      for (const auto& p : e.args) members.push_back(p.get<int>());
    }
    auto sorted = members;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (int p = 1; p <= n; ++p) {
      const auto& o = tr.outcome(ProcessId{p});
      if (o.value) REQUIRE(o.value->as_view().size() >= static_cast<std::size_t>(n - k));
    }
    REQUIRE(check_is(tr, "kis", k).passed());
  }
}

TEST_CASE("consensus: first proposal wins") {
  ConsensusOracle cs;
  CHECK(cs.propose(ProcessId{1}, 5) == Value(5));
  CHECK(cs.propose(ProcessId{2}, 3) == Value(5));
  CHECK(cs.decided() == Value(5));
  CHECK_THROWS_AS(cs.propose(ProcessId{1}, 4), ModelError);
}

TEST_CASE("consensus histories agree on every interleaving") {
  for (int t = 0; t <= 2; ++t) {
    std::size_t traces = 0;
    enumerate_runs(consensus_world(3, t), ExploreOptions{Exploration::interleavings, 1000}, [&](const Trace& tr) {
      ++traces;
      REQUIRE(check_consensus_linearizable(tr, "cs").passed());
      REQUIRE(tr.distinct_decisions() <= 1);
      return true;
    });
    CHECK(traces > 0);
  }
}

TEST_CASE("solo immediate snapshot returns its own pair") {
  World w = make_instance(Algorithm::is, ModelConfig{3, 2, 2, 0, 1000}, std::vector<std::int64_t>{7, 8, 9});
  ScriptedSchedule sched({Action::crash(ProcessId{2}), Action::crash(ProcessId{3})});
  const Trace tr = run(w, sched);
  CHECK(tr.outcome(ProcessId{1}).value == Value(view_of({{1, 7}})));
}

TEST_CASE("immediate snapshot at n=3: every state passes, and concurrent peers share a view") {
  World w = make_instance(Algorithm::is, ModelConfig{3, 0, 2, 0, 1000}, default_inputs(3));
  bool shared = false;
  std::size_t traces = 0;
  enumerate_runs(w, ExploreOptions{Exploration::states, 1000}, [&](const Trace& tr) {
    ++traces;
    const auto rep = check_is(tr, "is", 2);
    REQUIRE(rep.passed());
    for (int a = 1; a <= 3; ++a) {
      for (int b = a + 1; b <= 3; ++b) {
        const auto& va = tr.outcome(ProcessId{a}).value;
        const auto& vb = tr.outcome(ProcessId{b}).value;
        if (va && vb && *va == *vb && va->as_view().size() == 2) shared = true;
      }
    }
    return true;
  });
  CHECK(traces > 1);
  CHECK(shared);
}

TEST_CASE("immediate snapshot at n=4 passes the k=n-1 checks for every crash bound") {
  for (int t = 0; t <= 3; ++t) {
    World w = make_instance(Algorithm::is, ModelConfig{4, t, 3, 0, 100000}, default_inputs(4));
    SuiteOptions opt;
    opt.exhaustive = true;
    const auto res = run_suite(w, opt);
    CHECK(res.passed());
    CHECK(res.traces > 0);
  }
}
