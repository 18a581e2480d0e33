#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pagebound/index.hpp"
#include "pagebound/store.hpp"

namespace pagebound {

enum class Condition { flat, flat_sorted, indexed, indexed_corrupted, deep_indexed };

std::string_view to_string(Condition c);
Condition parse_condition(std::string_view text);
/// Pages are key-sorted in every condition except FLAT.
PageOrdering ordering_for(Condition c);

enum class CallKind { read_page, get_index, get_section_index, submit_answer, free_text };

std::string_view to_string(CallKind k);
/// Tool name to kind; nullopt for unknown names and for free text.
std::optional<CallKind> parse_tool_name(std::string_view name);

/// One agent turn: a tool invocation, or free text that invokes nothing.
struct ToolCall {
  CallKind kind = CallKind::free_text;
  std::string argument;  // page number, section number, answer, or the free text
  /// Provider-reported tokens for this call (external counting only).
  std::optional<std::int64_t> reported_tokens;

  static ToolCall read_page(std::size_t n) { return {CallKind::read_page, std::to_string(n), {}}; }
  static ToolCall get_index() { return {CallKind::get_index, {}, {}}; }
  static ToolCall get_section_index(std::size_t s) {
    return {CallKind::get_section_index, std::to_string(s), {}};
  }
  static ToolCall submit_answer(std::string v) { return {CallKind::submit_answer, std::move(v), {}}; }
  static ToolCall free_text(std::string text) { return {CallKind::free_text, std::move(text), {}}; }

  /// Transcript form, e.g. "read_page(3)"; free text renders as itself.
  std::string render() const;
  friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

bool tool_allowed(Condition c, CallKind k);

enum class CounterMode { bytes4, whitespace, external };

std::string_view to_string(CounterMode m);
CounterMode parse_counter_mode(std::string_view text);

class TokenCounter {
 public:
  explicit TokenCounter(CounterMode mode = CounterMode::bytes4) : mode_(mode) {}
  CounterMode mode() const { return mode_; }
  /// bytes4: ceil(bytes / 4); whitespace: word count. Throws in external
  /// mode, where counts come from the provider instead.
  std::int64_t count(std::string_view text) const;

 private:
  CounterMode mode_;
};

enum class Role { system, agent, environment };

struct Turn {
  Role role;
  std::string text;
  std::int64_t tokens;
};

/// Append-only history with full-history accounting: every agent turn is
/// charged the tokens of everything before it plus itself.
class Transcript {
 public:
  void append_system(std::string text, std::int64_t tokens);
  /// Appends an agent turn and returns its charge.
  std::int64_t charge_agent_turn(std::string text, std::int64_t tokens);
  /// Appends an agent turn with an externally supplied charge.
  void record_agent_turn(std::string text, std::int64_t charge);
  void append_result(std::string text, std::int64_t tokens);
  void count_data_read() { ++data_page_reads_; }

  const std::vector<Turn>& turns() const { return turns_; }
  std::int64_t history_tokens() const { return history_tokens_; }
  std::int64_t cumulative_tokens() const { return cumulative_tokens_; }
  std::int64_t calls_made() const { return calls_made_; }
  std::int64_t data_page_reads() const { return data_page_reads_; }
  std::int64_t last_charge() const { return last_charge_; }
  /// FNV-1a over roles and texts, as 16 hex digits.
  std::string digest() const;

 private:
  std::vector<Turn> turns_;
  std::int64_t history_tokens_ = 0;
  std::int64_t cumulative_tokens_ = 0;
  std::int64_t calls_made_ = 0;
  std::int64_t data_page_reads_ = 0;
  std::int64_t last_charge_ = 0;
};

struct TokenBudget {
  std::int64_t limit = 100'000;
  bool exceeded_by(std::int64_t spent) const { return spent > limit; }
};

struct EnvironmentOptions {
  TokenCounter counter{CounterMode::bytes4};
  TokenBudget budget;
  std::int64_t max_calls = 200;
  std::size_t pages_per_section = 10;
  std::uint64_t corruption_seed = 0;
};

enum class TrialStatus { running, answered, budget_exhausted, call_cap };

std::string_view to_string(TrialStatus s);

/// Executes tool calls for one trial against a store and the index
/// structures its condition calls for. Single owner.
class Environment {
 public:
  Environment(std::shared_ptr<const PageStore> store, Condition condition, Key target,
              EnvironmentOptions options = {});

  /// Charges the call, then runs it. Returns the tool result text (empty
  /// when the charge exhausts the budget). Throws std::logic_error once
  /// the trial is over.
  std::string execute(const ToolCall& call);

  bool finished() const { return status_ != TrialStatus::running; }
  TrialStatus status() const { return status_; }
  bool correct() const { return correct_; }
  const Transcript& transcript() const { return transcript_; }
  const std::string& preamble() const { return preamble_; }
  std::int64_t preamble_tokens() const { return preamble_tokens_; }
  Condition condition() const { return condition_; }
  const Key& target() const { return target_; }
  const PageStore& store() const { return *store_; }
  const std::optional<FlatToc>& toc() const { return toc_; }
  const std::optional<DeepIndex>& deep_index() const { return deep_; }

 private:
  std::string run(const ToolCall& call);

  std::shared_ptr<const PageStore> store_;
  Condition condition_;
  Key target_;
  std::string answer_;
  EnvironmentOptions options_;
  std::optional<FlatToc> toc_;
  std::optional<DeepIndex> deep_;
  std::string preamble_;
  std::int64_t preamble_tokens_ = 0;
  Transcript transcript_;
  TrialStatus status_ = TrialStatus::running;
  bool correct_ = false;
};

/// The task statement every call carries, e.g. "Find the value for key 1234."
std::string task_statement(const Key& target);

/// Condition rules for a model agent (remote adapter system prompt).
std::string condition_rules(Condition c, std::size_t pages, std::size_t pages_per_section);

std::string_view trim(std::string_view s);

}  // namespace pagebound
