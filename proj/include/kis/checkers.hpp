#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kis/model.hpp"

namespace kis {

struct Verdict {
  bool pass = true;
  Json witness;  // null when passing

  static Verdict ok() { return {}; }
  static Verdict fail(Json w) { return {false, std::move(w)}; }
};

struct CheckReport {
  std::string object;
  std::vector<std::pair<std::string, Verdict>> verdicts;

  bool passed() const;
  /// Throws if the property was not checked.
  const Verdict& verdict(std::string_view property) const;
  /// Names of failing properties.
  std::vector<std::string> failures() const;
  Json to_json() const;
};

/// One process's operation on an object, as recorded in a trace.
struct OpRecord {
  ProcessId pid;
  std::uint64_t invoke_step = 0;
  Value input = 0;
  std::optional<std::uint64_t> respond_step;
  std::optional<Value> output;
  bool crashed = false;  // a crash event for pid exists anywhere in the trace
};

struct History {
  std::string object;
  int n = 0;
  bool truncated = false;
  std::vector<OpRecord> ops;  // ordered by pid
};

/// Operations on `object` in invocation order per pid; simulated-on-behalf
/// events (args carrying "as") are skipped. Throws ModelError for an object
/// the trace never mentions, a respond without invoke or a second invocation.
History extract_history(const Trace& trace, std::string_view object);

/// Termination, self_inclusion, validity, containment, immediacy,
/// immediacy_symmetric, immediacy_forms_agree, and output_size when k given.
CheckReport check_is(const History& h, std::optional<int> k);
CheckReport check_is(const Trace& trace, std::string_view object, std::optional<int> k);

/// Smallest returned view V, l = |V|: l >= n-k, and each pid in V returned
/// exactly V or crashed without responding.
CheckReport check_theorem1(const History& h, int n, int k);
CheckReport check_theorem1(const Trace& trace, std::string_view object, int n, int k);

/// Validity (decisions are inputs), agreement (<= x distinct decisions) and
/// termination (every non-crashed process returned, run not truncated).
CheckReport check_xsa(const Trace& trace, std::string_view object, int x);

/// Single decided value, equal in every response, proposed by an invocation
/// preceding the first response.
CheckReport check_consensus_linearizable(const Trace& trace, std::string_view object);

}  // namespace kis
