#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pagebound/agents.hpp"
#include "pagebound/remote.hpp"

namespace pagebound {

/// Policy id plus string parameters, e.g. {"binary_search", {{"p_err", "0.3"}}}.
///
/// Ids: linear_scan, uniform_probe, binary_search (p_err), flat_toc,
/// corrupted_fallback, deep, shortcut (f, hallucination_accuracy,
/// guess_fraction, free_text_tokens, base), remote (max_retries, temperature).
struct PolicySpec {
  std::string id;
  std::map<std::string, std::string> params;

  /// "id" or "id[k=v,k=v]"; stable, used in seeds and cell keys.
  std::string label() const;
  static PolicySpec parse(std::string_view text);
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// The oracle policy for each condition.
PolicySpec default_policy(Condition c);

struct TrialConfig {
  Condition condition = Condition::flat;
  ContentSpec content;
  std::int64_t items = 50;              // M
  std::int64_t items_per_page = 10;     // P
  std::int64_t pages_per_section = 10;  // S
  PolicySpec policy;                    // empty id: default_policy(condition)
  std::uint64_t trial_index = 0;
  std::uint64_t seed_offset = 0;
  std::int64_t budget = 100'000;
  CounterMode counter = CounterMode::bytes4;
  std::int64_t max_calls = 200;
  /// Draw the target from this page position instead of uniformly.
  std::optional<std::size_t> target_page;

  theory::StoreShape shape() const { return {items, items_per_page, pages_per_section}; }
  PolicySpec effective_policy() const;
  /// Throws std::invalid_argument for configurations no trial can run.
  void validate() const;
};

/// hash(condition, content, M, P, policy, trial index) mixed with the offset.
std::uint64_t trial_seed(const TrialConfig& cfg);

struct TrialResult {
  TrialConfig config;
  std::int64_t reads = 0;  // data pages read, R
  std::int64_t tool_calls = 0;
  std::int64_t tokens = 0;  // Tok
  std::int64_t preamble_tokens = 0;
  std::int64_t last_charge = 0;
  bool correct = false;
  bool budget_exhausted = false;
  bool call_cap = false;
  bool protocol_failure = false;
  bool infrastructure_error = false;
  std::string target;
  std::string transcript_digest;
  std::vector<Turn> transcript;  // only with RunOptions::keep_transcript
};

struct RunOptions {
  std::optional<RemoteConfig> remote;
  /// Replaces the HTTP transport of remote policies (tests, recording).
  ChatTransport transport;
  bool keep_transcript = false;
};

std::unique_ptr<Policy> make_policy(const TrialConfig& cfg, const Environment& env,
                                    std::uint64_t seed, const RunOptions& options);

TrialResult run_trial(const TrialConfig& cfg, const RunOptions& options = {});

struct Summary {
  Condition condition = Condition::flat;
  ContentKind content = ContentKind::hash;
  std::int64_t items = 0;
  std::int64_t items_per_page = 0;
  std::string policy;
  std::int64_t n_trials = 0;
  std::int64_t n_valid = 0;  // excludes infrastructure errors
  bool no_data = true;
  double median_reads = 0, iqr_lo_reads = 0, iqr_hi_reads = 0;
  double median_tokens = 0, iqr_lo_tokens = 0, iqr_hi_tokens = 0;
  double accuracy_pct = 0;
  double exhausted_pct = 0;
  double predicted_reads = 0;
  std::int64_t predicted_bound = 0;
};

/// Median (midpoint for even counts) and lower-interpolated quartiles,
/// clamped so lo <= median <= hi.
struct Quartiles {
  double lo = 0, median = 0, hi = 0;
};
Quartiles quartiles(std::vector<double> values);

/// Expected data-page reads for the cell's condition: (N+1)/2 for FLAT,
/// one more for a corrupted index, the bisection bound for FLAT-SORTED and
/// one page for sound indices.
double predicted_reads(Condition c, std::int64_t pages);

/// One cell's results. The cell identity comes from the first result.
Summary aggregate(std::span<const TrialResult> results, std::int64_t branching = 10);

struct Cell {
  TrialConfig base;
  std::int64_t trials = 50;
};

struct SweepOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::int64_t branching = 10;
  RunOptions run;
};

struct SweepResult {
  std::vector<TrialResult> results;  // cell order, then trial index
  std::vector<Summary> summaries;    // one per cell
};

SweepResult run_sweep(const std::vector<Cell>& cells, const SweepOptions& options = {});

enum class GrowAccess { sequential, indexed_rebuild };

struct GrowModeConfig {
  std::int64_t initial_pages = 0;  // N0
  std::int64_t steps = 1;          // T
  GrowAccess access = GrowAccess::sequential;
  std::int64_t items_per_page = 10;
  std::uint64_t seed = 0;
};

struct GrowSeries {
  std::vector<std::int64_t> step_reads;  // data-page reads per step
  std::vector<std::int64_t> cumulative;
  std::int64_t rebuild_entries = 0;  // index maintenance work, not charged
};

/// One fresh page per step, then one retrieval of a uniformly chosen
/// stored key by uniform probing or by a freshly rebuilt table of contents.
GrowSeries grow_mode(const GrowModeConfig& cfg);

}  // namespace pagebound
