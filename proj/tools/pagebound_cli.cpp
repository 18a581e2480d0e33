// pagebound: run retrieval benchmarks over paginated stores and compare the
// measurements with closed-form retrieval costs.

#include <fstream>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>

#include "pagebound/report.hpp"
#include "pagebound/theory.hpp"

namespace {

using namespace pagebound;

struct RunFlags {
  std::string sweep_file;
  std::vector<std::string> conditions, contents, item_counts, policies, policy_params;
  std::string P, S, trials, budget, counter, seed_offset, out_dir, corpus, b, max_calls, threads;
  bool strict = false;
  bool log_wire = false;
  int max_concurrent_requests = 4;
};

void add_run_options(CLI::App& run, RunFlags& f) {
  run.add_option("--sweep", f.sweep_file, "Sweep file (key=value lines); flags below override it");
  run.add_option("--condition", f.conditions,
                 "flat, flat_sorted, indexed, indexed_corrupted, deep_indexed (comma list)");
  run.add_option("--content", f.contents, "hash, numeric, encyclopedia (comma list)");
  run.add_option("--M", f.item_counts, "Item counts (comma list)");
  run.add_option("--P", f.P, "Items per page (default 10)");
  run.add_option("--S", f.S, "Pages per section (default 10)");
  run.add_option("--policy", f.policies,
                 "Policy id, optionally with parameters: binary_search[p_err=0.3]");
  run.add_option("--policy-param", f.policy_params, "k=v applied to every policy");
  run.add_option("--trials", f.trials, "Trials per cell (default 50)");
  run.add_option("--budget", f.budget, "Token budget per trial (default 100000)");
  run.add_option("--counter", f.counter, "Token counter: bytes4, whitespace, external");
  run.add_option("--seed-offset", f.seed_offset, "Offset mixed into every trial seed");
  run.add_option("--out-dir", f.out_dir, "Output directory (default results)");
  run.add_option("--corpus", f.corpus, "JSONL encyclopedia corpus (key, value)");
  run.add_option("--b", f.b, "Branching factor for the indexed bound column (default 10)");
  run.add_option("--max-calls", f.max_calls, "Per-trial call cap (default 200)");
  run.add_option("--threads", f.threads, "Worker threads (default: all cores)");
  run.add_option("--max-concurrent-requests", f.max_concurrent_requests,
                 "Cap on simultaneous remote-model requests");
  run.add_flag("--strict", f.strict, "Exit nonzero if any trial hit an infrastructure error");
  run.add_flag("--log-wire", f.log_wire, "Log remote request/response bodies to <out-dir>/wire.log");
}

SweepSpec build_spec(const RunFlags& f) {
  SweepSpec spec = f.sweep_file.empty() ? SweepSpec{} : load_sweep(f.sweep_file);
  auto set_list = [&](const char* key, const std::vector<std::string>& values) {
    if (values.empty()) return;
    // flags replace rather than extend what the sweep file listed
    if (std::string_view(key) == "condition") spec.conditions.clear();
    if (std::string_view(key) == "content") spec.contents.clear();
    if (std::string_view(key) == "M") spec.item_counts.clear();
    if (std::string_view(key) == "policy") spec.policies.clear();
    for (const auto& v : values) spec.set(key, v);
  };
  set_list("condition", f.conditions);
  set_list("content", f.contents);
  set_list("M", f.item_counts);
  set_list("policy", f.policies);
  for (const auto& kv : f.policy_params) spec.set("policy_param", kv);
  for (auto [key, value] : {std::pair{"P", &f.P}, {"S", &f.S}, {"trials", &f.trials},
                            {"budget", &f.budget}, {"counter", &f.counter},
                            {"seed_offset", &f.seed_offset}, {"out_dir", &f.out_dir},
                            {"corpus", &f.corpus}, {"b", &f.b}, {"max_calls", &f.max_calls},
                            {"threads", &f.threads}}) {
    if (!value->empty()) spec.set(key, *value);
  }
  return spec;
}

void write_outputs(const std::vector<TrialResult>& results, const std::vector<Summary>& summaries,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "results.jsonl");
    write_jsonl(out, results);
  }
  {
    std::ofstream out(dir / "summary.csv");
    write_summary_csv(out, summaries);
  }
  {
    std::ofstream out(dir / "comparison.csv");
    write_comparison_csv(out, compare(summaries));
  }
  emit_plotdata(summaries, dir);
}

int run_command(const RunFlags& f) {
  SweepSpec spec = build_spec(f);
  auto cells = spec.cells();

  SweepOptions options;
  options.threads = spec.threads;
  options.branching = spec.branching;
  const bool needs_remote = std::any_of(cells.begin(), cells.end(), [](const Cell& c) {
    return c.base.effective_policy().id == "remote";
  });
  std::ofstream wire;
  std::mutex wire_mutex;
  if (needs_remote) {
    auto remote = RemoteConfig::from_env();
    if (!remote) {
      std::cerr << "error: the remote policy needs REPRO_LLM_BASE_URL and REPRO_LLM_MODEL\n";
      return 2;
    }
    remote->limiter = std::make_shared<RequestLimiter>(std::max(1, f.max_concurrent_requests));
    if (f.log_wire) {
      std::filesystem::create_directories(spec.out_dir);
      wire.open(spec.out_dir / "wire.log");
      remote->wire_log = [&](const std::string& line) {
        std::lock_guard lock(wire_mutex);
        wire << line << '\n';
      };
    }
    options.run.remote = std::move(remote);
  }

  auto sweep = run_sweep(cells, options);
  write_outputs(sweep.results, sweep.summaries, spec.out_dir);
  print_summary_table(std::cout, sweep.summaries);
  std::cout << "\nwrote " << sweep.results.size() << " trials to " << spec.out_dir.string() << "\n";

  const bool infra = std::any_of(sweep.results.begin(), sweep.results.end(),
                                 [](const TrialResult& r) { return r.infrastructure_error; });
  if (infra) std::cerr << "warning: some trials hit infrastructure errors\n";
  return (f.strict && infra) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential versus indexed retrieval benchmarks for page-bounded agents"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Execute a sweep and write JSONL, CSV and plot data");
  add_run_options(*run, run_flags);

  std::int64_t items = 0, per_page = 10, per_section = 10, branching = 10;
  std::int64_t capacity = 0, key_tokens = 0, sep_tokens = 0, overhead = 0;
  std::int64_t n0 = -1, steps = 0;
  auto* predict = app.add_subcommand("predict", "Print closed-form retrieval costs");
  predict->add_option("--M", items, "Item count")->required();
  predict->add_option("--P", per_page, "Items per page");
  predict->add_option("--S", per_section, "Pages per section");
  predict->add_option("--b", branching, "Branching factor");
  predict->add_option("--C", capacity, "Page capacity in tokens (derives b with eta, kappa, delta)");
  predict->add_option("--eta", key_tokens, "Key tokens per index entry");
  predict->add_option("--kappa", sep_tokens, "Separator-key tokens per entry");
  predict->add_option("--delta", overhead, "Formatting tokens per entry");
  predict->add_option("--N0", n0, "Initial pages for the accumulation costs");
  predict->add_option("--T", steps, "Reasoning steps for the accumulation costs");

  std::int64_t grow_n0 = 0, grow_t = 100, grow_runs = 1, grow_p = 10;
  std::uint64_t grow_seed = 0;
  std::string grow_access = "sequential";
  auto* grow = app.add_subcommand("grow", "Accumulating store: one new page per step");
  grow->add_option("--N0", grow_n0, "Initial pages");
  grow->add_option("--T", grow_t, "Steps");
  grow->add_option("--access", grow_access, "sequential or indexed_rebuild");
  grow->add_option("--runs", grow_runs, "Independent runs to average");
  grow->add_option("--P", grow_p, "Items per page");
  grow->add_option("--seed", grow_seed, "Base seed");

  std::string results_path, out_dir = "results";
  auto* cmp = app.add_subcommand("compare", "Compare measured medians against theory");
  cmp->add_option("--results", results_path, "results.jsonl")->required();
  cmp->add_option("--b", branching, "Branching factor for the bound column");
  auto* plot = app.add_subcommand("plotdata", "Emit plot-data CSVs from results");
  plot->add_option("--results", results_path, "results.jsonl")->required();
  plot->add_option("--out-dir", out_dir, "Directory for the CSV files");
  plot->add_option("--b", branching, "Branching factor for the bound column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_flags);

    if (*predict) {
      namespace th = theory;
      th::StoreShape shape{items, per_page, per_section};
      if (capacity > 0) branching = th::branching_factor({capacity, key_tokens, sep_tokens, overhead});
      const auto pages = shape.pages();
      std::cout << "M = " << items << ", P = " << per_page << ", N = " << pages << ", b = " << branching
                << "\n";
      std::cout << "expected_sequential_reads = "
                << format_number(th::to_double(th::expected_sequential_cost(pages))) << "\n";
      std::cout << "worst_sequential_reads = " << th::worst_sequential_cost(pages) << "\n";
      std::cout << "indexed_bound_pages = " << th::indexed_cost_bound(pages, branching) << "\n";
      std::cout << "indexed_bound_items = " << th::indexed_cost_bound(items, branching) << "\n";
      std::cout << "separation_ratio = "
                << format_number(th::to_double(th::separation_ratio(pages, branching))) << "\n";
      std::cout << "sections = " << (pages + per_section - 1) / per_section << "\n";
      if (n0 >= 0 && steps > 0) {
        th::AccumulationShape acc{n0, steps};
        std::cout << "cumulative_sequential_reads (expected-case accumulation) = "
                  << format_number(th::to_double(th::cumulative_sequential_cost(acc))) << "\n";
        std::cout << "cumulative_indexed_bound = " << th::cumulative_indexed_cost(acc, branching)
                  << "\n";
      }
      return 0;
    }

    if (*grow) {
      GrowAccess access = grow_access == "sequential" ? GrowAccess::sequential
                          : grow_access == "indexed_rebuild"
                              ? GrowAccess::indexed_rebuild
                              : throw std::invalid_argument("unknown access: " + grow_access);
      std::vector<double> mean(static_cast<std::size_t>(grow_t), 0.0);
      for (std::int64_t r = 0; r < grow_runs; ++r) {
        auto series = grow_mode({grow_n0, grow_t, access, grow_p, derive_seed(grow_seed, static_cast<std::uint64_t>(r))});
        for (std::size_t i = 0; i < mean.size(); ++i) {
          mean[i] += static_cast<double>(series.cumulative[i]) / static_cast<double>(grow_runs);
        }
      }
      std::cout << "t,mean_cumulative_reads,expected_sequential\n";
      for (std::int64_t t = 1; t <= grow_t; ++t) {
        auto expected = theory::cumulative_sequential_cost({grow_n0, t});
        std::cout << t << ',' << format_number(mean[static_cast<std::size_t>(t - 1)]) << ','
                  << format_number(theory::to_double(expected)) << '\n';
      }
      return 0;
    }

    std::ifstream in(results_path);
    if (!in) {
      std::cerr << "error: cannot open " << results_path << "\n";
      return 2;
    }
    auto summaries = summarize(read_jsonl(in), branching);
    if (*cmp) {
      write_comparison_csv(std::cout, compare(summaries));
      return 0;
    }
    for (const auto& path : emit_plotdata(summaries, out_dir)) std::cout << path.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
