#include "pagebound/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace pagebound {
namespace {

double param_double(const PolicySpec& spec, const std::string& name, double fallback) {
  auto it = spec.params.find(name);
  if (it == spec.params.end()) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("policy parameter " + name + " is not a number: " + it->second);
  }
}

std::string param_string(const PolicySpec& spec, const std::string& name, std::string fallback) {
  auto it = spec.params.find(name);
  return it == spec.params.end() ? fallback : it->second;
}

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> ids = {"linear_scan", "uniform_probe", "binary_search",
                                               "flat_toc",    "corrupted_fallback", "deep",
                                               "shortcut",    "remote"};
  return ids;
}

}  // namespace

std::string PolicySpec::label() const {
  if (params.empty()) return id;
  std::string out = id + "[";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out += ",";
    out += k + "=" + v;
    first = false;
  }
  return out + "]";
}

PolicySpec PolicySpec::parse(std::string_view text) {
  PolicySpec spec;
  auto open = text.find('[');
  spec.id = std::string(trim(text.substr(0, open)));
  if (open == std::string_view::npos) return spec;
  if (!text.ends_with("]")) throw std::invalid_argument("malformed policy: " + std::string(text));
  auto body = text.substr(open + 1, text.size() - open - 2);
  while (!body.empty()) {
    auto comma = body.find(',');
    auto kv = body.substr(0, comma);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("malformed policy parameter: " + std::string(kv));
    spec.params[std::string(trim(kv.substr(0, eq)))] = std::string(trim(kv.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return spec;
}

PolicySpec default_policy(Condition c) {
  switch (c) {
    case Condition::flat: return {"uniform_probe", {}};
    case Condition::flat_sorted: return {"binary_search", {}};
    case Condition::indexed: return {"flat_toc", {}};
    case Condition::indexed_corrupted: return {"corrupted_fallback", {}};
    case Condition::deep_indexed: return {"deep", {}};
  }
  return {};
}

PolicySpec TrialConfig::effective_policy() const {
  return policy.id.empty() ? default_policy(condition) : policy;
}

void TrialConfig::validate() const {
  shape().validate();
  const auto spec = effective_policy();
  if (std::find(known_policies().begin(), known_policies().end(), spec.id) == known_policies().end()) {
    throw std::invalid_argument("unknown policy: " + spec.id);
  }
  if (content.kind == ContentKind::hash && items > 9000) {
    throw std::invalid_argument("hash content supports at most 9000 items");
  }
  if (condition == Condition::indexed_corrupted && shape().pages() < 2) {
    throw std::invalid_argument("a corrupted index needs at least two pages");
  }
  if (budget < 1) throw std::invalid_argument("token budget must be >= 1");
  if (max_calls < 1) throw std::invalid_argument("max calls must be >= 1");
  if (counter == CounterMode::external && spec.id != "remote") {
    throw std::invalid_argument("external token counting needs the remote policy");
  }
  if (target_page && (*target_page < 1 || *target_page > static_cast<std::size_t>(shape().pages()))) {
    throw std::invalid_argument("target page out of range");
  }
  if (spec.id == "shortcut" && param_string(spec, "base", "") == "shortcut") {
    throw std::invalid_argument("shortcut base cannot be shortcut");
  }
}

std::uint64_t trial_seed(const TrialConfig& cfg) {
  std::string id = std::string(to_string(cfg.condition)) + "|" +
                   std::string(to_string(cfg.content.kind)) + "|" + std::to_string(cfg.items) +
                   "|" + std::to_string(cfg.items_per_page) + "|" + cfg.effective_policy().label() +
                   "|" + std::to_string(cfg.trial_index);
  return derive_seed(fnv1a(id), cfg.seed_offset);
}

std::unique_ptr<Policy> make_policy(const TrialConfig& cfg, const Environment& env,
                                    std::uint64_t seed, const RunOptions& options) {
  const PolicySpec spec = cfg.effective_policy();
  if (spec.id == "linear_scan") return std::make_unique<LinearScanPolicy>();
  if (spec.id == "uniform_probe") return std::make_unique<UniformProbePolicy>(seed);
  if (spec.id == "binary_search") {
    return std::make_unique<BinarySearchPolicy>(param_double(spec, "p_err", 0.0), seed);
  }
  if (spec.id == "flat_toc") return std::make_unique<FlatTocPolicy>(true, "flat_toc");
  if (spec.id == "corrupted_fallback") return std::make_unique<FlatTocPolicy>(true, "corrupted_fallback");
  if (spec.id == "deep") return std::make_unique<DeepTraversalPolicy>();
  if (spec.id == "shortcut") {
    ShortcutParams params;
    params.familiarity = param_double(spec, "f", 0.0);
    params.hallucination_accuracy = param_double(
        spec, "hallucination_accuracy", default_hallucination_accuracy(cfg.content.kind));
    params.guess_fraction = param_double(spec, "guess_fraction", 0.5);
    params.free_text_tokens =
        static_cast<std::int64_t>(param_double(spec, "free_text_tokens", 500));
    TrialConfig base_cfg = cfg;
    base_cfg.policy = {param_string(spec, "base", default_policy(cfg.condition).id), {}};
    auto base = make_policy(base_cfg, env, derive_seed(seed, 1), options);
    auto guesser = make_guesser(cfg.content.kind, env.target(),
                                *env.store().answer(env.target()),
                                params.hallucination_accuracy);
    return std::make_unique<ParametricShortcutPolicy>(params, std::move(base), std::move(guesser),
                                                      derive_seed(seed, 2));
  }
  if (spec.id == "remote") {
    if (!options.remote) {
      throw std::invalid_argument(
          "remote policy needs REPRO_LLM_BASE_URL and REPRO_LLM_MODEL");
    }
    RemoteConfig rc = *options.remote;
    rc.max_retries = static_cast<int>(param_double(spec, "max_retries", rc.max_retries));
    rc.temperature = param_double(spec, "temperature", rc.temperature);
    if (options.transport) return std::make_unique<RemoteModelPolicy>(rc, options.transport);
    return std::make_unique<RemoteModelPolicy>(rc);
  }
  throw std::invalid_argument("unknown policy: " + spec.id);
}

TrialResult run_trial(const TrialConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const std::uint64_t seed = trial_seed(cfg);
  auto items = generate_items(cfg.content, cfg.items, derive_seed(seed, 1));
  auto store = std::make_shared<const PageStore>(
      paginate(cfg.content.kind, std::move(items), cfg.items_per_page,
               ordering_for(cfg.condition), derive_seed(seed, 2), cfg.pages_per_section));
  auto target = cfg.target_page ? pick_target_on_page(*store, *cfg.target_page, derive_seed(seed, 3))
                                : pick_target(*store, derive_seed(seed, 3));

  EnvironmentOptions env_options;
  env_options.counter = TokenCounter(cfg.counter);
  env_options.budget.limit = cfg.budget;
  env_options.max_calls = cfg.max_calls;
  env_options.pages_per_section = static_cast<std::size_t>(cfg.pages_per_section);
  env_options.corruption_seed = derive_seed(seed, 4);
  Environment env(store, cfg.condition, target.first, env_options);
  auto policy = make_policy(cfg, env, derive_seed(seed, 5), options);

  TrialResult result;
  result.config = cfg;
  result.target = target.first.text();
  Observation obs{"", 0, cfg.condition, cfg.shape(), target.first, env.preamble()};
  try {
    while (!env.finished()) {
      ToolCall call = policy->step(obs);
      obs.last_result = env.execute(call);
      obs.calls_made = env.transcript().calls_made();
    }
  } catch (const InfrastructureError&) {
    result.infrastructure_error = true;
  } catch (const ProtocolFailure&) {
    result.protocol_failure = true;
  } catch (const std::invalid_argument&) {
    // a remote reply without usage under external counting
    if (cfg.effective_policy().id != "remote") throw;
    result.protocol_failure = true;
  }

  const auto& tr = env.transcript();
  result.reads = tr.data_page_reads();
  result.tool_calls = tr.calls_made();
  result.tokens = tr.cumulative_tokens();
  result.preamble_tokens = env.preamble_tokens();
  result.last_charge = tr.last_charge();
  result.correct = env.status() == TrialStatus::answered && env.correct();
  result.budget_exhausted = env.status() == TrialStatus::budget_exhausted;
  result.call_cap = env.status() == TrialStatus::call_cap;
  result.transcript_digest = tr.digest();
  if (options.keep_transcript) result.transcript = tr.turns();
  return result;
}

Quartiles quartiles(std::vector<double> values) {
  Quartiles q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  q.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  auto lower = [&](double p) {
    return values[static_cast<std::size_t>(std::floor(p * static_cast<double>(n - 1)))];
  };
  q.lo = std::min(lower(0.25), q.median);
  q.hi = std::max(lower(0.75), q.median);
  return q;
}

double predicted_reads(Condition c, std::int64_t pages) {
  switch (c) {
    case Condition::flat: return theory::to_double(theory::expected_sequential_cost(pages));
    case Condition::indexed_corrupted:
      return theory::to_double(theory::expected_sequential_cost(pages)) + 1.0;
    case Condition::flat_sorted:
      return static_cast<double>(theory::indexed_cost_bound(pages, 2));
    case Condition::indexed:
    case Condition::deep_indexed:
      return 1.0;
  }
  return 0.0;
}

Summary aggregate(std::span<const TrialResult> results, std::int64_t branching) {
  Summary s;
  if (results.empty()) return s;
  const auto& cfg = results.front().config;
  s.condition = cfg.condition;
  s.content = cfg.content.kind;
  s.items = cfg.items;
  s.items_per_page = cfg.items_per_page;
  s.policy = cfg.effective_policy().label();
  s.n_trials = static_cast<std::int64_t>(results.size());
  const std::int64_t pages = cfg.shape().pages();
  s.predicted_reads = predicted_reads(cfg.condition, pages);
  s.predicted_bound = theory::indexed_cost_bound(pages, branching);

  std::vector<double> reads, tokens;
  std::int64_t correct = 0, exhausted = 0;
  for (const auto& r : results) {
    if (r.infrastructure_error) continue;
    reads.push_back(static_cast<double>(r.reads));
    tokens.push_back(static_cast<double>(r.tokens));
    correct += r.correct ? 1 : 0;
    exhausted += r.budget_exhausted ? 1 : 0;
  }
  s.n_valid = static_cast<std::int64_t>(reads.size());
  s.no_data = reads.empty();
  if (s.no_data) return s;
  auto qr = quartiles(std::move(reads));
  auto qt = quartiles(std::move(tokens));
  s.median_reads = qr.median;
  s.iqr_lo_reads = qr.lo;
  s.iqr_hi_reads = qr.hi;
  s.median_tokens = qt.median;
  s.iqr_lo_tokens = qt.lo;
  s.iqr_hi_tokens = qt.hi;
  s.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(s.n_valid);
  s.exhausted_pct = 100.0 * static_cast<double>(exhausted) / static_cast<double>(s.n_valid);
  return s;
}

SweepResult run_sweep(const std::vector<Cell>& cells, const SweepOptions& options) {
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& c : cells) {
    c.base.validate();
    if (c.trials < 1) throw std::invalid_argument("trials per cell must be >= 1");
    offsets.push_back(total);
    total += static_cast<std::size_t>(c.trials);
  }

  SweepResult out;
  out.results.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      auto cell = static_cast<std::size_t>(
          std::upper_bound(offsets.begin(), offsets.end(), job) - offsets.begin() - 1);
      TrialConfig cfg = cells[cell].base;
      cfg.trial_index = job - offsets[cell];
      out.results[job] = run_trial(cfg, options.run);
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::span<const TrialResult> slice(out.results.data() + offsets[c],
                                       static_cast<std::size_t>(cells[c].trials));
    out.summaries.push_back(aggregate(slice, options.branching));
  }
  return out;
}

GrowSeries grow_mode(const GrowModeConfig& cfg) {
  theory::AccumulationShape{cfg.initial_pages, cfg.steps}.validate();
  if (cfg.items_per_page < 1) throw std::invalid_argument("items per page must be >= 1");
  const std::int64_t p = cfg.items_per_page;
  std::vector<KeyRange> ranges;
  auto append_page = [&] {
    const std::int64_t first = static_cast<std::int64_t>(ranges.size()) * p + 1;
    ranges.push_back({Key(first), Key(first + p - 1)});
  };
  for (std::int64_t i = 0; i < cfg.initial_pages; ++i) append_page();

  Rng rng(cfg.seed);
  GrowSeries series;
  std::vector<std::size_t> order;
  std::int64_t total = 0;
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    append_page();
    const auto pages = ranges.size();
    const Key target(std::uniform_int_distribution<std::int64_t>(
        1, static_cast<std::int64_t>(pages) * p)(rng));
    std::int64_t reads = 0;
    if (cfg.access == GrowAccess::sequential) {
      order.resize(pages);
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = 0; i < pages; ++i) {
        auto j = std::uniform_int_distribution<std::size_t>(i, pages - 1)(rng);
        std::swap(order[i], order[j]);
        ++reads;
        if (ranges[order[i]].contains(target)) break;
      }
    } else {
      FlatToc toc = build_flat_toc(ranges);
      series.rebuild_entries += static_cast<std::int64_t>(toc.entries.size());
      const auto page = locate_page(toc, target);
      ++reads;
      if (!ranges[page - 1].contains(target)) throw std::logic_error("index traversal missed");
    }
    total += reads;
    series.step_reads.push_back(reads);
    series.cumulative.push_back(total);
  }
  return series;
}

}  // namespace pagebound
