#include "pagebound/environment.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "pagebound/rng.hpp"

namespace pagebound {
namespace {

std::optional<std::size_t> parse_index_argument(std::string_view arg) {
  arg = trim(arg);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (arg.empty() || ec != std::errc() || ptr != arg.data() + arg.size()) return std::nullopt;
  return v;
}

constexpr std::string_view kNoToolNudge =
    "No tool call received. Use one of the available tools.";

}  // namespace

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::flat: return "flat";
    case Condition::flat_sorted: return "flat_sorted";
    case Condition::indexed: return "indexed";
    case Condition::indexed_corrupted: return "indexed_corrupted";
    case Condition::deep_indexed: return "deep_indexed";
  }
  return "unknown";
}

Condition parse_condition(std::string_view text) {
  for (auto c : {Condition::flat, Condition::flat_sorted, Condition::indexed,
                 Condition::indexed_corrupted, Condition::deep_indexed}) {
    if (text == to_string(c)) return c;
  }
  if (text == "sorted") return Condition::flat_sorted;
  if (text == "corrupted") return Condition::indexed_corrupted;
  if (text == "deep") return Condition::deep_indexed;
  throw std::invalid_argument("unknown condition: " + std::string(text));
}

PageOrdering ordering_for(Condition c) {
  return c == Condition::flat ? PageOrdering::random : PageOrdering::sorted;
}

std::string_view to_string(CallKind k) {
  switch (k) {
    case CallKind::read_page: return "read_page";
    case CallKind::get_index: return "get_index";
    case CallKind::get_section_index: return "get_section_index";
    case CallKind::submit_answer: return "submit_answer";
    case CallKind::free_text: return "free_text";
  }
  return "unknown";
}

std::optional<CallKind> parse_tool_name(std::string_view name) {
  for (auto k : {CallKind::read_page, CallKind::get_index, CallKind::get_section_index,
                 CallKind::submit_answer}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string ToolCall::render() const {
  if (kind == CallKind::free_text) return argument;
  return std::string(to_string(kind)) + "(" + argument + ")";
}

bool tool_allowed(Condition c, CallKind k) {
  switch (k) {
    case CallKind::read_page:
    case CallKind::submit_answer:
    case CallKind::free_text:
      return true;
    case CallKind::get_index:
      return c == Condition::indexed || c == Condition::indexed_corrupted ||
             c == Condition::deep_indexed;
    case CallKind::get_section_index:
      return c == Condition::deep_indexed;
  }
  return false;
}

std::string_view to_string(CounterMode m) {
  switch (m) {
    case CounterMode::bytes4: return "bytes4";
    case CounterMode::whitespace: return "whitespace";
    case CounterMode::external: return "external";
  }
  return "unknown";
}

CounterMode parse_counter_mode(std::string_view text) {
  for (auto m : {CounterMode::bytes4, CounterMode::whitespace, CounterMode::external}) {
    if (text == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown counter mode: " + std::string(text));
}

std::int64_t TokenCounter::count(std::string_view text) const {
  switch (mode_) {
    case CounterMode::bytes4:
      return static_cast<std::int64_t>((text.size() + 3) / 4);
    case CounterMode::whitespace: {
      std::int64_t words = 0;
      bool in_word = false;
      for (unsigned char c : text) {
        bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!space && !in_word) ++words;
        in_word = !space;
      }
      return words;
    }
    case CounterMode::external:
      throw std::logic_error("external token counts come from the model provider");
  }
  return 0;
}

void Transcript::append_system(std::string text, std::int64_t tokens) {
  history_tokens_ += tokens;
  turns_.push_back({Role::system, std::move(text), tokens});
}

std::int64_t Transcript::charge_agent_turn(std::string text, std::int64_t tokens) {
  const std::int64_t charge = history_tokens_ + tokens;
  record_agent_turn(std::move(text), charge);
  history_tokens_ += tokens;
  turns_.back().tokens = tokens;
  return charge;
}

void Transcript::record_agent_turn(std::string text, std::int64_t charge) {
  cumulative_tokens_ += charge;
  last_charge_ = charge;
  ++calls_made_;
  turns_.push_back({Role::agent, std::move(text), 0});
}

void Transcript::append_result(std::string text, std::int64_t tokens) {
  history_tokens_ += tokens;
  turns_.push_back({Role::environment, std::move(text), tokens});
}

std::string Transcript::digest() const {
  std::uint64_t h = fnv1a("");
  for (const auto& t : turns_) {
    const char role = t.role == Role::system ? 's' : (t.role == Role::agent ? 'a' : 'e');
    h = fnv1a(std::string_view(&role, 1), h);
    h = fnv1a(t.text, h);
    h = fnv1a(std::string_view("\x1e", 1), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::running: return "running";
    case TrialStatus::answered: return "answered";
    case TrialStatus::budget_exhausted: return "budget_exhausted";
    case TrialStatus::call_cap: return "call_cap";
  }
  return "unknown";
}

std::string task_statement(const Key& target) {
  return "Find the value for key " + target.text() + ".";
}

std::string condition_rules(Condition c, std::size_t pages, std::size_t pages_per_section) {
  const std::string n = std::to_string(pages);
  std::string rules = "You are looking up one value in a paginated key-value store of " + n +
                      " pages. Each page lists entries as '<key>: <value>'. You cannot see "
                      "any page without calling a tool. ";
  switch (c) {
    case Condition::flat:
      rules += "Pages are in no particular order. Tools: read_page(n), submit_answer(value).";
      break;
    case Condition::flat_sorted:
      rules += "Pages are sorted by key in ascending order: page 1 holds the smallest keys "
               "and page " + n + " the largest. Tools: read_page(n), submit_answer(value).";
      break;
    case Condition::indexed:
    case Condition::indexed_corrupted:
      rules += "Pages are sorted by key. get_index() returns a table of contents giving each "
               "page's key range. Tools: get_index(), read_page(n), submit_answer(value).";
      break;
    case Condition::deep_indexed:
      rules += "Pages are sorted by key and grouped into sections of " +
               std::to_string(pages_per_section) +
               " pages. get_index() lists sections with their key ranges; "
               "get_section_index(s) lists the key range of each page in section s. Tools: "
               "get_index(), get_section_index(s), read_page(n), submit_answer(value).";
      break;
  }
  return rules + " Submit exactly the value text shown on the page.";
}

Environment::Environment(std::shared_ptr<const PageStore> store, Condition condition,
                         Key target, EnvironmentOptions options)
    : store_(std::move(store)),
      condition_(condition),
      target_(std::move(target)),
      options_(options) {
  if (!store_) throw std::invalid_argument("environment needs a store");
  const std::string* answer = store_->answer(target_);
  if (!answer) throw std::invalid_argument("target key not in store: " + target_.text());
  answer_ = *answer;
  switch (condition_) {
    case Condition::indexed:
      toc_ = build_flat_toc(*store_);
      break;
    case Condition::indexed_corrupted:
      toc_ = corrupt_toc(build_flat_toc(*store_), options_.corruption_seed);
      break;
    case Condition::deep_indexed:
      deep_ = build_deep_index(*store_, options_.pages_per_section);
      break;
    default:
      break;
  }
  preamble_ = task_statement(target_);
  preamble_tokens_ = options_.counter.mode() == CounterMode::external
                         ? 0
                         : options_.counter.count(preamble_);
  transcript_.append_system(preamble_, preamble_tokens_);
}

std::string Environment::execute(const ToolCall& call) {
  if (finished()) throw std::logic_error("trial already finished");
  const bool external = options_.counter.mode() == CounterMode::external;
  std::string turn = call.render();
  if (external) {
    if (!call.reported_tokens) throw std::invalid_argument("external counting needs reported tokens");
    transcript_.record_agent_turn(std::move(turn), *call.reported_tokens);
  } else {
    const auto tokens = options_.counter.count(turn);
    transcript_.charge_agent_turn(std::move(turn), tokens);
  }
  if (options_.budget.exceeded_by(transcript_.cumulative_tokens())) {
    status_ = TrialStatus::budget_exhausted;
    correct_ = false;
    return {};
  }
  std::string result = run(call);
  transcript_.append_result(result, external ? 0 : options_.counter.count(result));
  if (status_ == TrialStatus::running && transcript_.calls_made() >= options_.max_calls) {
    status_ = TrialStatus::call_cap;
  }
  return result;
}

std::string Environment::run(const ToolCall& call) {
  if (!tool_allowed(condition_, call.kind)) {
    return "ERROR: tool not available: " + std::string(to_string(call.kind));
  }
  switch (call.kind) {
    case CallKind::read_page: {
      auto n = parse_index_argument(call.argument);
      if (!n || *n < 1 || *n > store_->page_count()) {
        return "ERROR: no page " + call.argument + "; pages are 1.." +
               std::to_string(store_->page_count());
      }
      transcript_.count_data_read();
      return render_page(*store_, *n);
    }
    case CallKind::get_index:
      return deep_ ? render_master(*deep_) : render_toc(*toc_);
    case CallKind::get_section_index: {
      auto s = parse_index_argument(call.argument);
      if (!s || *s < 1 || *s > deep_->sections.size()) {
        return "ERROR: no section " + call.argument + "; sections are 1.." +
               std::to_string(deep_->sections.size());
      }
      return render_toc(deep_->sections[*s - 1]);
    }
    case CallKind::submit_answer:
      status_ = TrialStatus::answered;
      correct_ = trim(call.argument) == answer_;
      return "ANSWER RECORDED";
    case CallKind::free_text:
      return std::string(kNoToolNudge);
  }
  return {};
}

}  // namespace pagebound
