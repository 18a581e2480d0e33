#pragma once

// Agent policies. A policy sees only what tool results have shown it (the
// Observation); it never touches the store. Deterministic policies are pure
// functions of their construction seed and the observation sequence.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pagebound/environment.hpp"
#include "pagebound/rng.hpp"

namespace pagebound {

struct Observation {
  std::string last_result;  // empty before the first call
  std::int64_t calls_made = 0;
  Condition condition = Condition::flat;
  theory::StoreShape shape;
  Key target_key;
  std::string preamble;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual ToolCall step(const Observation& obs) = 0;
  virtual std::string name() const = 0;
};

/// Items parsed back out of rendered page text.
struct ParsedPage {
  std::size_t page = 0;
  std::size_t page_count = 0;
  std::vector<std::pair<Key, std::string>> items;
};

/// Nullopt when `text` is not a rendered page.
std::optional<ParsedPage> parse_page(std::string_view text, bool numeric_keys);
/// Value of `key` on the page, by exact key-prefix line match.
std::optional<std::string> find_value(const ParsedPage& page, const Key& key);

/// Reads pages in a fixed order, submitting as soon as the target shows up.
/// An exhausted order submits an empty answer.
class ScanPolicy : public Policy {
 public:
  ToolCall step(const Observation& obs) override;

 protected:
  virtual std::size_t next_page(std::size_t page_count) = 0;
  std::size_t reads_ = 0;
};

class LinearScanPolicy final : public ScanPolicy {
 public:
  std::string name() const override { return "linear_scan"; }

 protected:
  std::size_t next_page(std::size_t page_count) override;
};

/// Distinct pages in a seeded uniformly random order.
class UniformProbePolicy final : public ScanPolicy {
 public:
  explicit UniformProbePolicy(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "uniform_probe"; }

 protected:
  std::size_t next_page(std::size_t page_count) override;

 private:
  Rng rng_;
  std::vector<std::size_t> order_;
};

/// Bisection over sorted pages. With probability `error_rate` per step one
/// bound is lost and reset to its extreme, which models an agent that
/// forgets where it was.
class BinarySearchPolicy final : public Policy {
 public:
  BinarySearchPolicy(double error_rate, std::uint64_t seed);
  ToolCall step(const Observation& obs) override;
  std::string name() const override { return "binary_search"; }

  std::size_t lo() const { return lo_; }
  std::size_t hi() const { return hi_; }

 private:
  double error_rate_;
  Rng rng_;
  bool started_ = false;
  std::size_t lo_ = 1;
  std::size_t hi_ = 0;
  std::size_t probe_ = 0;
};

/// get_index, locate, read, submit. If the page reached does not hold the
/// target (a corrupted index), restarts as a linear scan from page 1 without
/// remembering the wasted page.
class FlatTocPolicy final : public Policy {
 public:
  explicit FlatTocPolicy(bool fallback_scan = true, std::string label = "flat_toc")
      : fallback_scan_(fallback_scan), label_(std::move(label)) {}
  ToolCall step(const Observation& obs) override;
  std::string name() const override { return label_; }

 private:
  enum class Phase { start, have_index, reading, scanning };
  bool fallback_scan_;
  std::string label_;
  Phase phase_ = Phase::start;
  LinearScanPolicy scan_;
};

/// get_index (master), get_section_index, read, submit.
class DeepTraversalPolicy final : public Policy {
 public:
  ToolCall step(const Observation& obs) override;
  std::string name() const override { return "deep"; }

 private:
  enum class Phase { start, have_master, have_section, scanning };
  Phase phase_ = Phase::start;
  LinearScanPolicy scan_;
};

/// Parametric memory: proposes an answer for a key without reading.
using Guesser = std::function<std::string(const Key&, Rng&)>;

struct ShortcutParams {
  double familiarity = 0.0;             // per-step probability of the shortcut
  double hallucination_accuracy = 0.0;  // chance a guess is right
  double guess_fraction = 0.5;          // guess vs free-text when the shortcut fires
  std::int64_t free_text_tokens = 500;  // bytes4 size of a free-text turn
  void validate() const;
};

/// Mixes a retrieval policy with a parametric pathway that either submits a
/// guess or emits free text instead of a tool call.
class ParametricShortcutPolicy final : public Policy {
 public:
  ParametricShortcutPolicy(ShortcutParams params, std::unique_ptr<Policy> base,
                           Guesser guesser, std::uint64_t seed);
  ToolCall step(const Observation& obs) override;
  std::string name() const override { return "shortcut+" + base_->name(); }

 private:
  ShortcutParams params_;
  std::unique_ptr<Policy> base_;
  Guesser guesser_;
  Rng rng_;
  bool last_was_base_ = true;
  Observation base_pending_;
};

/// Guesser that is right with probability `accuracy` and otherwise returns
/// a plausible wrong value for the content kind.
Guesser make_guesser(ContentKind kind, Key target, std::string answer, double accuracy);

/// Default hallucination accuracy per content kind.
double default_hallucination_accuracy(ContentKind kind);

}  // namespace pagebound
