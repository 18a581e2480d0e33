#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pagebound/report.hpp"

using namespace pagebound;
namespace fs = std::filesystem;

namespace {

SweepSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sweep(in, "test.sweep");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t count_fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pagebound_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Summary summary_of(Condition c, std::int64_t m, double median, const std::string& policy = {}) {
  Summary s;
  s.condition = c;
  s.items = m;
  s.items_per_page = 10;
  s.policy = policy.empty() ? default_policy(c).label() : policy;
  s.n_trials = s.n_valid = 10;
  s.no_data = false;
  s.median_reads = s.iqr_lo_reads = s.iqr_hi_reads = median;
  s.median_tokens = s.iqr_lo_tokens = s.iqr_hi_tokens = median * 100;
  s.accuracy_pct = 100;
  const std::int64_t pages = (m + 9) / 10;
  s.predicted_reads = predicted_reads(c, pages);
  s.predicted_bound = theory::indexed_cost_bound(pages, 10);
  return s;
}

}  // namespace

TEST_CASE("sweep parsing") {
  auto spec = parse(
      "# a comment\n"
      "condition = flat, indexed\n"
      "content = hash\n"
      "M = 50, 100\n"
      "\n"
      "M = 200   # trailing comment\n"
      "trials = 7\n"
      "policy = uniform_probe\n"
      "policy = binary_search[p_err=0.2]\n"
      "policy_param = free_text_tokens=80\n"
      "budget = 5000\n"
      "seed_offset = 3\n");
  CHECK(spec.conditions == std::vector{Condition::flat, Condition::indexed});
  CHECK(spec.item_counts == std::vector<std::int64_t>{50, 100, 200});
  CHECK(spec.trials == 7);
  REQUIRE(spec.policies.size() == 2);
  auto cells = spec.cells();
  CHECK(cells.size() == 2 * 2 * 3);
  for (const auto& c : cells) {
    CHECK(c.trials == 7);
    CHECK(c.base.budget == 5000);
    CHECK(c.base.seed_offset == 3);
    CHECK(c.base.policy.params.at("free_text_tokens") == "80");
  }
  CHECK(cells[3].base.policy.label() == "binary_search[free_text_tokens=80,p_err=0.2]");

  auto oracle = parse("condition = deep_indexed, flat_sorted\nM = 500\n").cells();
  REQUIRE(oracle.size() == 2);
  CHECK(oracle[0].base.policy.id == "deep");
  CHECK(oracle[1].base.policy.id == "binary_search");

  CHECK_THROWS_WITH_AS(parse("M = 50\ncondition flat\n"), doctest::Contains("test.sweep:2:"),
                       SweepParseError);
  CHECK_THROWS_WITH_AS(parse("\n\n\nbogus = 1\n"), doctest::Contains("test.sweep:4:"), SweepParseError);
  CHECK_THROWS_WITH_AS(parse("M = fifty\n"), doctest::Contains("test.sweep:1:"), SweepParseError);
  CHECK_THROWS_WITH_AS(parse("condition = nowhere\n"), doctest::Contains("test.sweep:1:"),
                       SweepParseError);
  CHECK_THROWS_AS(parse("M = 50\n").cells(), std::invalid_argument);
  CHECK_THROWS_AS(load_sweep("/nonexistent/sweep.txt"), std::runtime_error);
}

TEST_CASE("jsonl round trip") {
  SweepSpec spec = parse(
      "condition = flat, indexed_corrupted, deep_indexed\n"
      "content = hash, encyclopedia\n"
      "M = 60\n"
      "trials = 5\n");
  auto sweep = run_sweep(spec.cells());
  std::stringstream buf;
  write_jsonl(buf, sweep.results);
  const std::string text = buf.str();
  auto back = read_jsonl(buf);
  REQUIRE(back.size() == sweep.results.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& a = sweep.results[i];
    const auto& b = back[i];
    CHECK(b.reads == a.reads);
    CHECK(b.tokens == a.tokens);
    CHECK(b.correct == a.correct);
    CHECK(b.target == a.target);
    CHECK(b.transcript_digest == a.transcript_digest);
    CHECK(b.config.effective_policy() == a.config.effective_policy());
    CHECK(trial_seed(b.config) == trial_seed(a.config));
  }
  std::stringstream again;
  write_jsonl(again, back);
  CHECK(again.str() == text);

  std::stringstream rerun;
  write_jsonl(rerun, run_sweep(spec.cells()).results);
  CHECK(rerun.str() == text);

  // summaries from the file equal summaries from memory
  auto from_file = summarize(back);
  REQUIRE(from_file.size() == sweep.summaries.size());
  for (std::size_t i = 0; i < from_file.size(); ++i) {
    CHECK(from_file[i].median_reads == sweep.summaries[i].median_reads);
    CHECK(from_file[i].median_tokens == sweep.summaries[i].median_tokens);
  }

  std::istringstream broken("{\"condition\":\"flat\"}\n");
  CHECK_THROWS_WITH(read_jsonl(broken), doctest::Contains("line 1"));
}

TEST_CASE("summary csv") {
  CHECK(format_number(3) == "3");
  CHECK(format_number(25.5) == "25.5");
  CHECK(format_number(1.0 / 3) == "0.333333");

  auto good = summary_of(Condition::flat, 500, 25);
  auto empty = summary_of(Condition::indexed, 500, 0);
  empty.no_data = true;
  std::ostringstream out;
  write_summary_csv(out, {good, empty});
  auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "condition,content,M,P,policy,n_trials,median_R,iqr_lo_R,iqr_hi_R,median_Tok,iqr_lo_Tok,"
        "iqr_hi_Tok,accuracy_pct,exhausted_pct,predicted_R,predicted_bound");
  for (const auto& l : lines) CHECK(count_fields(l) == 16);
  CHECK(lines[1] == "flat,hash,500,10,uniform_probe,10,25,25,25,2500,2500,2500,100,0,25.5,3");
  CHECK(lines[2].find("no data") != std::string::npos);

  std::ostringstream table;
  print_summary_table(table, {good, empty});
  CHECK(table.str().find("no data") != std::string::npos);
  CHECK(lines_of(table.str()).size() == 3);
}

TEST_CASE("compare") {
  CHECK(compare({}).empty());
  std::ostringstream header_only;
  write_comparison_csv(header_only, {});
  CHECK(lines_of(header_only.str()).size() == 1);

  SweepSpec spec = parse("condition = flat, indexed, deep_indexed, flat_sorted\nM = 500\ntrials = 1000\n");
  auto rows = compare(run_sweep(spec.cells()).summaries);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].ratio_to_predicted == doctest::Approx(1).epsilon(0.1));
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(rows[i].ratio_to_predicted <= 1);
    CHECK(!rows[i].violation);
  }
  CHECK(rows[1].ratio_to_bound <= 1);

  auto bad = summary_of(Condition::indexed, 500, 4);
  CHECK(compare({bad})[0].violation);
  CHECK(!compare({summary_of(Condition::indexed, 500, 4, "shortcut[f=0.5]")})[0].violation);

  std::ostringstream csv;
  write_comparison_csv(csv, rows);
  auto lines = lines_of(csv.str());
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] ==
        "condition,content,M,P,policy,median_R,predicted_R,ratio_to_predicted,predicted_bound,"
        "ratio_to_bound,violation");
  for (const auto& l : lines) CHECK(count_fields(l) == 11);
}

TEST_CASE("plot data") {
  std::vector<Summary> summaries;
  for (std::int64_t m : {50, 100, 200, 500}) {
    summaries.push_back(summary_of(Condition::flat, m, static_cast<double>(m) / 20));
    summaries.push_back(summary_of(Condition::indexed, m, 1));
    summaries.push_back(summary_of(Condition::deep_indexed, m, 1));
  }
  summaries[0].iqr_lo_reads = 1;
  summaries[0].iqr_hi_reads = 4;
  const auto dir = scratch("plots");
  auto paths = emit_plotdata(summaries, dir);
  CHECK(paths.size() == 5);
  for (const auto& p : paths) CHECK(fs::exists(p));

  auto sep = lines_of(slurp(dir / "plot_separation.csv"));
  REQUIRE(sep.size() == 5);
  std::vector<std::string> ms;
  for (std::size_t i = 1; i < sep.size(); ++i) ms.push_back(sep[i].substr(5, sep[i].find(',', 5) - 5));
  CHECK(ms == std::vector<std::string>{"50", "100", "200", "500"});
  CHECK(sep[4] == "hash,500,uniform_probe,flat_toc,25,1,25,25.5");

  // each cell appears exactly once per series file
  for (const char* file : {"plot_reads_vs_m.csv", "plot_tokens_vs_m.csv"}) {
    auto rows = lines_of(slurp(dir / file));
    CHECK(rows.size() == summaries.size() + 1);
    std::map<std::string, int> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto first = rows[i].find(','), second = rows[i].find(',', first + 1);
      ++seen[rows[i].substr(0, second)];
    }
    for (const auto& [k, n] : seen) CHECK_MESSAGE(n == 1, std::string(k));
  }
  CHECK(lines_of(slurp(dir / "plot_deep_vs_flat.csv")).size() == 9);
  CHECK(lines_of(slurp(dir / "plot_content.csv")).size() == 5);

  for (auto metric : {PlotMetric::reads, PlotMetric::tokens}) {
    for (const auto& s : build_series(summaries, metric)) {
      for (const auto& pt : s.points) {
        CHECK(pt.band_lo <= pt.y);
        CHECK(pt.y <= pt.band_hi);
      }
    }
  }
  auto flat = build_series({summaries[0], summaries[3]}, PlotMetric::reads);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0].points.size() == 2);
  CHECK(flat[0].points[0].x < flat[0].points[1].x);

  const auto one = scratch("plots_one");
  emit_plotdata({summaries[0], summaries[1]}, one);
  CHECK(lines_of(slurp(one / "plot_separation.csv")).size() == 2);

  PlotSeries broken{"x", "", {{1, 5, 6, 7, std::nullopt}}};
  CHECK_THROWS_AS(broken.check(), std::logic_error);
  PlotSeries unordered{"x", "", {{2, 1, 1, 1, std::nullopt}, {1, 1, 1, 1, std::nullopt}}};
  CHECK_THROWS_AS(unordered.check(), std::logic_error);
}

TEST_CASE("cli runs are byte-identical") {
  auto run = [](const fs::path& out, const std::string& threads) {
    const std::string cmd = std::string(PAGEBOUND_CLI) +
                            " run --condition flat,indexed_corrupted --content hash --M 50,120"
                            " --trials 20 --threads " + threads + " --out-dir " + out.string() +
                            " > " + (out / "stdout.txt").string();
    fs::create_directories(out);
    return std::system(cmd.c_str());
  };
  const auto a = scratch("cli_a"), b = scratch("cli_b");
  REQUIRE(run(a, "1") == 0);
  REQUIRE(run(b, "3") == 0);
  for (const char* file : {"results.jsonl", "summary.csv", "comparison.csv", "plot_reads_vs_m.csv",
                           "plot_separation.csv"}) {
    CHECK_MESSAGE(slurp(a / file) == slurp(b / file), std::string(file));
  }
  // stdout ends by naming the output directory
  auto out_a = lines_of(slurp(a / "stdout.txt")), out_b = lines_of(slurp(b / "stdout.txt"));
  REQUIRE(out_a.size() == out_b.size());
  CHECK(std::equal(out_a.begin(), out_a.end() - 1, out_b.begin()));
  CHECK(lines_of(slurp(a / "results.jsonl")).size() == 80);
}
