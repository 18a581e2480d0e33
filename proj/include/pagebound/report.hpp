#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pagebound/harness.hpp"

namespace pagebound {

/// Malformed sweep description; the message carries "<source>:<line>: ".
class SweepParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Declarative run description. The grid is conditions x contents x
/// policies x item counts; an empty policy list means each condition's
/// oracle policy.
struct SweepSpec {
  std::vector<Condition> conditions;
  std::vector<ContentKind> contents;
  std::vector<std::int64_t> item_counts;
  std::int64_t items_per_page = 10;
  std::int64_t pages_per_section = 10;
  std::vector<PolicySpec> policies;
  std::map<std::string, std::string> policy_params;  // merged into every policy
  std::int64_t trials = 50;
  std::int64_t budget = 100'000;
  CounterMode counter = CounterMode::bytes4;
  std::uint64_t seed_offset = 0;
  std::int64_t max_calls = 200;
  std::int64_t branching = 10;
  unsigned threads = 0;
  std::optional<std::filesystem::path> corpus;
  std::filesystem::path out_dir = "results";

  /// Applies one key=value setting; repeatable keys append. Throws
  /// std::invalid_argument on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  std::vector<Cell> cells() const;
};

/// Line-oriented key=value text; '#' starts a comment.
SweepSpec parse_sweep(std::istream& in, const std::string& source = "sweep");
SweepSpec load_sweep(const std::filesystem::path& path);

nlohmann::json to_json(const TrialResult& r);
TrialResult trial_result_from_json(const nlohmann::json& j);
void write_jsonl(std::ostream& out, const std::vector<TrialResult>& results);
std::vector<TrialResult> read_jsonl(std::istream& in);

/// Groups results into cells by (condition, content, M, P, policy) in order
/// of first appearance, then aggregates each.
std::vector<Summary> summarize(const std::vector<TrialResult>& results, std::int64_t branching = 10);

std::string format_number(double v);

void write_summary_csv(std::ostream& out, const std::vector<Summary>& summaries);
void print_summary_table(std::ostream& out, const std::vector<Summary>& summaries);

struct ComparisonRow {
  Summary cell;
  double ratio_to_predicted = 0;  // measured median / predicted reads
  double ratio_to_bound = 0;      // measured median / indexed bound
  bool violation = false;         // an oracle cell above its theoretical ceiling
};

std::vector<ComparisonRow> compare(const std::vector<Summary>& summaries);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

struct PlotPoint {
  double x = 0, y = 0, band_lo = 0, band_hi = 0;
  std::optional<double> overlay;
};

/// One curve: x strictly increasing, band_lo <= y <= band_hi.
struct PlotSeries {
  std::string label;
  std::string overlay;  // theory curve id, empty when none
  std::vector<PlotPoint> points;
  /// Throws std::logic_error when an invariant fails.
  void check() const;
};

enum class PlotMetric { reads, tokens };

/// One series per (condition, content, policy).
std::vector<PlotSeries> build_series(const std::vector<Summary>& summaries, PlotMetric metric);

/// Writes plot_reads_vs_m.csv, plot_separation.csv, plot_tokens_vs_m.csv,
/// plot_deep_vs_flat.csv and plot_content.csv. Returns the paths written.
std::vector<std::filesystem::path> emit_plotdata(const std::vector<Summary>& summaries,
                                                 const std::filesystem::path& dir);

}  // namespace pagebound
