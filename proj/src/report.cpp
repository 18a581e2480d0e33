#include "pagebound/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace pagebound {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    auto comma = text.find(',');
    auto part = trim(text.substr(0, comma));
    if (!part.empty()) parts.push_back(part);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  try {
    std::size_t used = 0;
    std::string s(text);
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(key) + ": not an integer: " + std::string(text));
  }
}

std::string normalize_key(std::string_view key) {
  std::string k(trim(key));
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

using CellId = std::tuple<Condition, ContentKind, std::int64_t, std::int64_t, std::string>;

CellId cell_id(const TrialResult& r) {
  return {r.config.condition, r.config.content.kind, r.config.items, r.config.items_per_page,
          r.config.effective_policy().label()};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string series_label(const Summary& s) {
  return std::string(to_string(s.condition)) + "/" + std::string(to_string(s.content)) + "/" +
         s.policy;
}

void open_or_throw(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void SweepSpec::set(std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string_view value = trim(raw_value);
  if (key == "condition") {
    for (auto part : split_list(value)) conditions.push_back(parse_condition(part));
  } else if (key == "content") {
    for (auto part : split_list(value)) contents.push_back(parse_content_kind(part));
  } else if (key == "M") {
    for (auto part : split_list(value)) item_counts.push_back(parse_int(key, part));
  } else if (key == "P") {
    items_per_page = parse_int(key, value);
  } else if (key == "S") {
    pages_per_section = parse_int(key, value);
  } else if (key == "policy") {
    policies.push_back(PolicySpec::parse(value));
  } else if (key == "policy_param") {
    auto eq = value.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("policy_param expects k=v");
    policy_params[std::string(trim(value.substr(0, eq)))] = std::string(trim(value.substr(eq + 1)));
  } else if (key == "trials") {
    trials = parse_int(key, value);
  } else if (key == "budget") {
    budget = parse_int(key, value);
  } else if (key == "counter") {
    counter = parse_counter_mode(value);
  } else if (key == "seed_offset") {
    seed_offset = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "max_calls") {
    max_calls = parse_int(key, value);
  } else if (key == "b") {
    branching = parse_int(key, value);
  } else if (key == "threads") {
    threads = static_cast<unsigned>(parse_int(key, value));
  } else if (key == "corpus") {
    corpus = std::filesystem::path(std::string(value));
  } else if (key == "out_dir") {
    out_dir = std::filesystem::path(std::string(value));
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

std::vector<Cell> SweepSpec::cells() const {
  if (conditions.empty()) throw std::invalid_argument("sweep names no condition");
  if (item_counts.empty()) throw std::invalid_argument("sweep names no item count M");
  const std::vector<ContentKind> kinds = contents.empty() ? std::vector{ContentKind::hash} : contents;
  std::vector<Cell> out;
  for (auto condition : conditions) {
    for (auto kind : kinds) {
      std::vector<PolicySpec> specs = policies;
      if (specs.empty()) specs.push_back(default_policy(condition));
      for (auto spec : specs) {
        for (const auto& [k, v] : policy_params) spec.params.emplace(k, v);
        for (auto m : item_counts) {
          Cell cell;
          cell.trials = trials;
          auto& cfg = cell.base;
          cfg.condition = condition;
          cfg.content.kind = kind;
          if (kind == ContentKind::encyclopedia) cfg.content.corpus_path = corpus;
          cfg.items = m;
          cfg.items_per_page = items_per_page;
          cfg.pages_per_section = pages_per_section;
          cfg.policy = spec;
          cfg.seed_offset = seed_offset;
          cfg.budget = budget;
          cfg.counter = counter;
          cfg.max_calls = max_calls;
          out.push_back(std::move(cell));
        }
      }
    }
  }
  return out;
}

SweepSpec parse_sweep(std::istream& in, const std::string& source) {
  SweepSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    std::string_view content = trim(std::string_view(line).substr(0, hash));
    if (content.empty()) continue;
    auto eq = content.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw SweepParseError(where + "expected key=value");
    try {
      spec.set(content.substr(0, eq), content.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw SweepParseError(where + e.what());
    }
  }
  return spec;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep file " + path.string());
  return parse_sweep(in, path.string());
}

json to_json(const TrialResult& r) {
  const auto& c = r.config;
  const auto spec = c.effective_policy();
  json j = {{"condition", to_string(c.condition)},
            {"content", to_string(c.content.kind)},
            {"M", c.items},
            {"P", c.items_per_page},
            {"S", c.pages_per_section},
            {"N", c.shape().pages()},
            {"policy", spec.id},
            {"policy_params", spec.params},
            {"trial_index", c.trial_index},
            {"seed_offset", c.seed_offset},
            {"budget", c.budget},
            {"counter", to_string(c.counter)},
            {"max_calls", c.max_calls},
            {"target", r.target},
            {"R", r.reads},
            {"tool_calls", r.tool_calls},
            {"Tok", r.tokens},
            {"preamble_tokens", r.preamble_tokens},
            {"correct", r.correct},
            {"budget_exhausted", r.budget_exhausted},
            {"call_cap", r.call_cap},
            {"protocol_failure", r.protocol_failure},
            {"infrastructure_error", r.infrastructure_error},
            {"transcript_digest", r.transcript_digest}};
  if (c.content.corpus_path) j["corpus"] = c.content.corpus_path->string();
  if (c.target_page) j["target_page"] = *c.target_page;
  return j;
}

TrialResult trial_result_from_json(const json& j) {
  TrialResult r;
  auto& c = r.config;
  c.condition = parse_condition(j.at("condition").get<std::string>());
  c.content.kind = parse_content_kind(j.at("content").get<std::string>());
  if (j.contains("corpus")) c.content.corpus_path = j["corpus"].get<std::string>();
  c.items = j.at("M").get<std::int64_t>();
  c.items_per_page = j.at("P").get<std::int64_t>();
  c.pages_per_section = j.value("S", std::int64_t{10});
  c.policy.id = j.at("policy").get<std::string>();
  if (j.contains("policy_params")) {
    c.policy.params = j["policy_params"].get<std::map<std::string, std::string>>();
  }
  c.trial_index = j.value("trial_index", std::uint64_t{0});
  c.seed_offset = j.value("seed_offset", std::uint64_t{0});
  c.budget = j.value("budget", std::int64_t{100'000});
  c.counter = parse_counter_mode(j.value("counter", std::string("bytes4")));
  c.max_calls = j.value("max_calls", std::int64_t{200});
  if (j.contains("target_page")) c.target_page = j["target_page"].get<std::size_t>();
  r.target = j.value("target", std::string());
  r.reads = j.at("R").get<std::int64_t>();
  r.tool_calls = j.value("tool_calls", std::int64_t{0});
  r.tokens = j.at("Tok").get<std::int64_t>();
  r.preamble_tokens = j.value("preamble_tokens", std::int64_t{0});
  r.correct = j.at("correct").get<bool>();
  r.budget_exhausted = j.value("budget_exhausted", false);
  r.call_cap = j.value("call_cap", false);
  r.protocol_failure = j.value("protocol_failure", false);
  r.infrastructure_error = j.value("infrastructure_error", false);
  r.transcript_digest = j.value("transcript_digest", std::string());
  return r;
}

void write_jsonl(std::ostream& out, const std::vector<TrialResult>& results) {
  for (const auto& r : results) out << to_json(r).dump() << '\n';
}

std::vector<TrialResult> read_jsonl(std::istream& in) {
  std::vector<TrialResult> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      results.push_back(trial_result_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("results line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return results;
}

std::vector<Summary> summarize(const std::vector<TrialResult>& results, std::int64_t branching) {
  std::vector<CellId> order;
  std::map<CellId, std::vector<TrialResult>> groups;
  for (const auto& r : results) {
    auto id = cell_id(r);
    auto [it, inserted] = groups.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back(r);
  }
  std::vector<Summary> out;
  for (const auto& id : order) out.push_back(aggregate(groups[id], branching));
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", v);
  }
  return buf;
}

void write_summary_csv(std::ostream& out, const std::vector<Summary>& summaries) {
  out << "condition,content,M,P,policy,n_trials,median_R,iqr_lo_R,iqr_hi_R,median_Tok,"
         "iqr_lo_Tok,iqr_hi_Tok,accuracy_pct,exhausted_pct,predicted_R,predicted_bound\n";
  for (const auto& s : summaries) {
    out << to_string(s.condition) << ',' << to_string(s.content) << ',' << s.items << ','
        << s.items_per_page << ',' << csv_field(s.policy) << ',' << s.n_trials << ',';
    if (s.no_data) {
      out << "no data,,,,,,,,";
    } else {
      for (double v : {s.median_reads, s.iqr_lo_reads, s.iqr_hi_reads, s.median_tokens,
                       s.iqr_lo_tokens, s.iqr_hi_tokens, s.accuracy_pct, s.exhausted_pct}) {
        out << format_number(v) << ',';
      }
    }
    out << format_number(s.predicted_reads) << ',' << s.predicted_bound << '\n';
  }
}

void print_summary_table(std::ostream& out, const std::vector<Summary>& summaries) {
  out << std::left << std::setw(18) << "condition" << std::setw(13) << "content" << std::right
      << std::setw(6) << "M" << "  " << std::left << std::setw(24) << "policy" << std::right
      << std::setw(7) << "trials" << std::setw(9) << "R~" << std::setw(15) << "IQR(R)"
      << std::setw(11) << "Tok~" << std::setw(8) << "acc%" << std::setw(8) << "exh%"
      << std::setw(10) << "pred R" << '\n';
  for (const auto& s : summaries) {
    out << std::left << std::setw(18) << to_string(s.condition) << std::setw(13)
        << to_string(s.content) << std::right << std::setw(6) << s.items << "  " << std::left
        << std::setw(24) << s.policy << std::right << std::setw(7) << s.n_trials;
    if (s.no_data) {
      out << std::setw(9) << "no data";
    } else {
      std::string iqr = "[" + format_number(s.iqr_lo_reads) + ", " + format_number(s.iqr_hi_reads) + "]";
      out << std::setw(9) << format_number(s.median_reads) << std::setw(15) << iqr << std::setw(11)
          << format_number(s.median_tokens) << std::setw(8) << format_number(s.accuracy_pct)
          << std::setw(8) << format_number(s.exhausted_pct);
    }
    out << std::setw(10) << format_number(s.predicted_reads) << '\n';
  }
}

std::vector<ComparisonRow> compare(const std::vector<Summary>& summaries) {
  std::vector<ComparisonRow> rows;
  for (const auto& s : summaries) {
    ComparisonRow row{s, 0, 0, false};
    if (!s.no_data) {
      row.ratio_to_predicted = s.predicted_reads > 0 ? s.median_reads / s.predicted_reads : 0;
      row.ratio_to_bound = s.predicted_bound > 0 ? s.median_reads / static_cast<double>(s.predicted_bound) : 0;
      const bool oracle = s.policy == default_policy(s.condition).label();
      const bool bounded = s.condition == Condition::indexed ||
                           s.condition == Condition::deep_indexed ||
                           s.condition == Condition::flat_sorted;
      row.violation = oracle && bounded && s.median_reads > s.predicted_reads;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "condition,content,M,P,policy,median_R,predicted_R,ratio_to_predicted,predicted_bound,"
         "ratio_to_bound,violation\n";
  for (const auto& r : rows) {
    const auto& s = r.cell;
    out << to_string(s.condition) << ',' << to_string(s.content) << ',' << s.items << ','
        << s.items_per_page << ',' << csv_field(s.policy) << ','
        << (s.no_data ? "no data" : format_number(s.median_reads)) << ','
        << format_number(s.predicted_reads) << ',' << format_number(r.ratio_to_predicted) << ','
        << s.predicted_bound << ',' << format_number(r.ratio_to_bound) << ','
        << (r.violation ? "yes" : "no") << '\n';
  }
}

void PlotSeries::check() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (i > 0 && !(points[i - 1].x < p.x)) throw std::logic_error(label + ": x not strictly increasing");
    if (!(p.band_lo <= p.y && p.y <= p.band_hi)) throw std::logic_error(label + ": band excludes median");
  }
}

std::vector<PlotSeries> build_series(const std::vector<Summary>& summaries, PlotMetric metric) {
  std::vector<PlotSeries> series;
  std::map<std::string, std::size_t> by_label;
  for (const auto& s : summaries) {
    if (s.no_data) continue;
    const auto label = series_label(s);
    auto [it, inserted] = by_label.try_emplace(label, series.size());
    if (inserted) {
      PlotSeries ps;
      ps.label = label;
      if (metric == PlotMetric::reads) ps.overlay = "predicted_R";
      series.push_back(std::move(ps));
    }
    PlotPoint p;
    p.x = static_cast<double>(s.items);
    if (metric == PlotMetric::reads) {
      p.y = s.median_reads;
      p.band_lo = s.iqr_lo_reads;
      p.band_hi = s.iqr_hi_reads;
      p.overlay = s.predicted_reads;
    } else {
      p.y = s.median_tokens;
      p.band_lo = s.iqr_lo_tokens;
      p.band_hi = s.iqr_hi_tokens;
    }
    series[it->second].points.push_back(p);
  }
  for (auto& ps : series) {
    std::sort(ps.points.begin(), ps.points.end(),
              [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
    ps.check();
  }
  return series;
}

std::vector<std::filesystem::path> emit_plotdata(const std::vector<Summary>& summaries,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  auto write_series = [&](const std::string& file, PlotMetric metric, const char* ylabel) {
    auto path = dir / file;
    std::ofstream out;
    open_or_throw(out, path);
    out << "series,M," << ylabel << ",band_lo,band_hi,overlay_id,overlay_value\n";
    for (const auto& ps : build_series(summaries, metric)) {
      for (const auto& p : ps.points) {
        out << csv_field(ps.label) << ',' << format_number(p.x) << ',' << format_number(p.y) << ','
            << format_number(p.band_lo) << ',' << format_number(p.band_hi) << ',' << ps.overlay
            << ',' << (p.overlay ? format_number(*p.overlay) : "") << '\n';
      }
    }
    written.push_back(path);
  };
  write_series("plot_reads_vs_m.csv", PlotMetric::reads, "median_R");
  write_series("plot_tokens_vs_m.csv", PlotMetric::tokens, "median_Tok");

  {
    // FLAT over INDEXED, matched on content and M; the theory line is (N+1)/2 over 1.
    auto path = dir / "plot_separation.csv";
    std::ofstream out;
    open_or_throw(out, path);
    out << "content,M,flat_policy,indexed_policy,flat_median_R,indexed_median_R,ratio,predicted_ratio\n";
    std::vector<std::tuple<ContentKind, std::int64_t, std::string, std::string>> seen;
    for (const auto& f : summaries) {
      if (f.no_data || f.condition != Condition::flat) continue;
      for (const auto& x : summaries) {
        if (x.no_data || x.condition != Condition::indexed || x.content != f.content ||
            x.items != f.items || x.items_per_page != f.items_per_page) {
          continue;
        }
        auto key = std::make_tuple(f.content, f.items, f.policy, x.policy);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        const auto pages = (f.items + f.items_per_page - 1) / f.items_per_page;
        out << to_string(f.content) << ',' << f.items << ',' << csv_field(f.policy) << ','
            << csv_field(x.policy) << ',' << format_number(f.median_reads) << ','
            << format_number(x.median_reads) << ','
            << (x.median_reads > 0 ? format_number(f.median_reads / x.median_reads) : "inf") << ','
            << format_number(theory::to_double(theory::expected_sequential_cost(pages))) << '\n';
      }
    }
    written.push_back(path);
  }

  auto write_cells = [&](const std::string& file, auto&& keep) {
    auto path = dir / file;
    std::ofstream out;
    open_or_throw(out, path);
    out << "condition,content,policy,M,median_R,iqr_lo_R,iqr_hi_R,median_Tok,iqr_lo_Tok,"
           "iqr_hi_Tok,accuracy_pct,exhausted_pct\n";
    for (const auto& s : summaries) {
      if (s.no_data || !keep(s)) continue;
      out << to_string(s.condition) << ',' << to_string(s.content) << ',' << csv_field(s.policy)
          << ',' << s.items << ',' << format_number(s.median_reads) << ','
          << format_number(s.iqr_lo_reads) << ',' << format_number(s.iqr_hi_reads) << ','
          << format_number(s.median_tokens) << ',' << format_number(s.iqr_lo_tokens) << ','
          << format_number(s.iqr_hi_tokens) << ',' << format_number(s.accuracy_pct) << ','
          << format_number(s.exhausted_pct) << '\n';
    }
    written.push_back(path);
  };
  write_cells("plot_deep_vs_flat.csv", [](const Summary& s) {
    return s.condition == Condition::indexed || s.condition == Condition::deep_indexed;
  });
  write_cells("plot_content.csv",
              [](const Summary& s) { return s.condition == Condition::deep_indexed; });
  return written;
}

}  // namespace pagebound
