#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kis/checkers.hpp"
#include "kis/reductions.hpp"
#include "kis/simulation.hpp"
#include "kis/simulator.hpp"

namespace kis {

/// Seed of trial `i` of a family identified by `salt`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t i);

/// Every applicable check for the operation labels found in the trace:
/// k-IS objects (kis, kis1, kis2, alg2) get check_is with k and
/// check_theorem1, the register IS gets check_is with k = n-1, cs gets the
/// consensus check, alg1 and alg1v get check_xsa with their bound.
std::vector<CheckReport> standard_checks(const Trace& trace);
bool all_passed(const std::vector<CheckReport>& reports);
Json reports_json(const std::vector<CheckReport>& reports);

// ---------------------------------------------------------------------------

struct SuiteOptions {
  bool exhaustive = false;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  /// Random mode: crash budget sampled per trial.
  bool crashes = true;
};

struct SuiteResult {
  std::size_t traces = 0;
  std::size_t failures = 0;
  std::size_t truncated = 0;
  std::size_t max_distinct = 0;
  std::optional<Trace> first_failure;
  std::vector<CheckReport> first_failure_reports;
  std::optional<Trace> max_witness;  // first trace reaching max_distinct

  bool passed() const { return traces > 0 && failures == 0 && truncated == 0; }
  Json to_json() const;
};

using TraceCheck = std::function<std::vector<CheckReport>(const Trace&)>;

/// Runs `world` under every schedule (exhaustive, state-cached) or under
/// `trials` seeded random adversaries and checks every trace.
SuiteResult run_suite(const World& world, const SuiteOptions& options, const TraceCheck& check = standard_checks);

// ---------------------------------------------------------------------------

struct MatrixOptions {
  int n = 11;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  bool exhaustive = false;
  bool crashes = true;
  Algorithm algorithm = Algorithm::alg1;
  /// When set, the max-decision trace of each cell (and every violating one)
  /// is written there.
  std::optional<std::filesystem::path> witness_dir;
};

struct MatrixCell {
  int t = 0;
  int k = 0;
  int formula_x = 0;
  std::size_t observed_max = 0;
  std::size_t trials = 0;
  std::size_t invalid = 0;  // traces with a validity or termination failure
  std::size_t truncated = 0;
  std::optional<std::string> witness_path;
  std::optional<std::uint64_t> witness_seed;
  bool pass = false;
};

struct MatrixReport {
  int n = 0;
  std::string algorithm;
  std::string mode;
  std::uint64_t seed = 0;
  std::vector<MatrixCell> cells;

  bool passed() const;
  const MatrixCell& cell(int t, int k) const;
  /// formula_x never decreases along t or k.
  bool monotone() const;
  Json to_json() const;
  std::string table() const;
};

MatrixReport run_matrix(const MatrixOptions& options);

// ---------------------------------------------------------------------------

struct BlockingReport {
  int n = 0, t = 0, k = 0;
  bool expect_blocked = false;
  std::size_t runs = 0;
  std::size_t all_blocked = 0;   // runs where every surviving process ended blocked
  std::size_t all_returned = 0;  // runs where every surviving process returned
  std::size_t truncated = 0;
  std::optional<Trace> sample;

  bool passed() const;
  Json to_json() const;
};

/// Runs the naive read/write k-IS attempt with t initial crashes, one run per
/// seed. Expects quiescence with every survivor blocked iff t > k.
BlockingReport run_blocking_demo(int n, int t, int k, std::size_t seeds = 100, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------

struct EquivalenceReport {
  int n = 0, t = 0, k = 0;
  SuiteResult kis_from_consensus;   // alg2 histories against the k-IS checks
  SuiteResult consensus_from_kis;   // alg1 over the oracle with x = 1
  SuiteResult composed;             // alg1 over alg2 with x = 1

  bool passed() const { return kis_from_consensus.passed() && consensus_from_kis.passed() && composed.passed(); }
  Json to_json() const;
};

/// Throws ModelError outside 0 < t < n/2, t <= k <= n-1-t.
EquivalenceReport run_equivalence_suite(int n, int t, int k, const SuiteOptions& options);

// ---------------------------------------------------------------------------

struct SimulationReport {
  int n = 0, t = 0, k = 0;
  std::string partition;
  std::size_t outer_traces = 0;
  std::size_t outer_truncated = 0;
  std::size_t outer_with_crash = 0;  // runs where one simulator crashed
  std::size_t inner_failures = 0;
  std::size_t lemma1_failures = 0;
  std::size_t objects_with_response = 0;
  std::size_t q_decision_violations = 0;  // Q-level decisions beyond the inner bound
  std::optional<Trace> first_failure;
  Json first_failure_reports;

  bool passed() const {
    return outer_traces > 0 && outer_truncated == 0 && inner_failures == 0 && lemma1_failures == 0 &&
           q_decision_violations == 0;
  }
  Json to_json() const;
};

/// Runs the two-simulator construction over alg1_variant (exhaustive outer
/// interleavings, or random trials) and checks every extracted inner history.
SimulationReport run_simulation_suite(const ModelConfig& inner, const Partition& partition,
                                      std::array<std::int64_t, 2> inputs, const SuiteOptions& options);

}  // namespace kis
