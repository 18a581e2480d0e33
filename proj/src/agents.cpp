#include "pagebound/agents.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

namespace pagebound {
namespace {

std::size_t page_count_of(const Observation& obs) {
  return static_cast<std::size_t>(obs.shape.pages());
}

std::optional<std::size_t> parse_size(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string filler_text(const Key& key, std::int64_t tokens) {
  const std::string phrase = "As is well known, the entry for " + key.text() +
                             " reads much like the others around it. ";
  const auto bytes = static_cast<std::size_t>(std::max<std::int64_t>(tokens, 1) * 4);
  std::string text;
  text.reserve(bytes);
  while (text.size() < bytes) text += phrase;
  text.resize(bytes);
  return text;
}

}  // namespace

std::optional<ParsedPage> parse_page(std::string_view text, bool numeric_keys) {
  // "PAGE <n> OF <N>"
  auto nl = text.find('\n');
  std::string_view header = text.substr(0, nl);
  if (!header.starts_with("PAGE ")) return std::nullopt;
  auto of = header.find(" OF ");
  if (of == std::string_view::npos) return std::nullopt;
  auto n = parse_size(header.substr(5, of - 5));
  auto total = parse_size(header.substr(of + 4));
  if (!n || !total) return std::nullopt;
  ParsedPage page{*n, *total, {}};
  if (nl == std::string_view::npos) return page;
  text.remove_prefix(nl + 1);
  while (!text.empty()) {
    nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty()) continue;
    if (line.starts_with("Item ")) line.remove_prefix(5);
    auto colon = line.find(": ");
    if (colon == std::string_view::npos) return std::nullopt;
    try {
      page.items.emplace_back(Key::parse(line.substr(0, colon), numeric_keys),
                              std::string(line.substr(colon + 2)));
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  return page;
}

std::optional<std::string> find_value(const ParsedPage& page, const Key& key) {
  for (const auto& [k, v] : page.items) {
    if (k == key) return v;
  }
  return std::nullopt;
}

ToolCall ScanPolicy::step(const Observation& obs) {
  if (auto page = parse_page(obs.last_result, obs.target_key.is_number())) {
    if (auto value = find_value(*page, obs.target_key)) return ToolCall::submit_answer(*value);
  }
  const std::size_t next = next_page(page_count_of(obs));
  if (next == 0) return ToolCall::submit_answer("");
  ++reads_;
  return ToolCall::read_page(next);
}

std::size_t LinearScanPolicy::next_page(std::size_t page_count) {
  return reads_ < page_count ? reads_ + 1 : 0;
}

std::size_t UniformProbePolicy::next_page(std::size_t page_count) {
  if (order_.empty() && reads_ == 0) {
    order_.resize(page_count);
    std::iota(order_.begin(), order_.end(), std::size_t{1});
  }
  if (reads_ >= order_.size()) return 0;
  // lazy Fisher-Yates: fix position reads_ only when it is needed
  auto j = std::uniform_int_distribution<std::size_t>(reads_, order_.size() - 1)(rng_);
  std::swap(order_[reads_], order_[j]);
  return order_[reads_];
}

BinarySearchPolicy::BinarySearchPolicy(double error_rate, std::uint64_t seed)
    : error_rate_(error_rate), rng_(seed) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw std::invalid_argument("p_err must be in [0, 1]");
  }
}

ToolCall BinarySearchPolicy::step(const Observation& obs) {
  const std::size_t n = page_count_of(obs);
  if (!started_) {
    started_ = true;
    lo_ = 1;
    hi_ = n;
  } else {
    auto page = parse_page(obs.last_result, obs.target_key.is_number());
    if (!page || page->items.empty()) return ToolCall::submit_answer("");
    if (auto value = find_value(*page, obs.target_key)) return ToolCall::submit_answer(*value);
    if (obs.target_key < page->items.front().first) {
      hi_ = probe_ - 1;
    } else if (page->items.back().first < obs.target_key) {
      lo_ = probe_ + 1;
    } else {
      return ToolCall::submit_answer("");  // inside the page's range but absent
    }
    if (bernoulli(rng_, error_rate_)) {
      if (std::uniform_int_distribution<int>(0, 1)(rng_) == 0) {
        lo_ = 1;
      } else {
        hi_ = n;
      }
    }
  }
  if (lo_ > hi_ || hi_ == 0) return ToolCall::submit_answer("");
  probe_ = lo_ + (hi_ - lo_) / 2;
  return ToolCall::read_page(probe_);
}

ToolCall FlatTocPolicy::step(const Observation& obs) {
  const bool numeric = obs.target_key.is_number();
  auto fall_back = [&] {
    if (!fallback_scan_) return ToolCall::submit_answer("");
    phase_ = Phase::scanning;
    return scan_.step(obs);
  };
  switch (phase_) {
    case Phase::start:
      phase_ = Phase::have_index;
      return ToolCall::get_index();
    case Phase::have_index: {
      std::size_t page = 0;
      try {
        page = locate_page(parse_toc(obs.last_result, numeric), obs.target_key);
      } catch (const std::exception&) {
        return fall_back();
      }
      phase_ = Phase::reading;
      return ToolCall::read_page(page);
    }
    case Phase::reading:
      if (auto page = parse_page(obs.last_result, numeric)) {
        if (auto value = find_value(*page, obs.target_key)) return ToolCall::submit_answer(*value);
      }
      return fall_back();
    case Phase::scanning:
      return scan_.step(obs);
  }
  return ToolCall::submit_answer("");
}

ToolCall DeepTraversalPolicy::step(const Observation& obs) {
  const bool numeric = obs.target_key.is_number();
  auto fall_back = [&] {
    phase_ = Phase::scanning;
    return scan_.step(obs);
  };
  switch (phase_) {
    case Phase::start:
      phase_ = Phase::have_master;
      return ToolCall::get_index();
    case Phase::have_master: {
      std::size_t section = 0;
      try {
        auto master = parse_master(obs.last_result, numeric);
        section = locate_section(std::span<const SectionEntry>(master), obs.target_key);
      } catch (const std::exception&) {
        return fall_back();
      }
      phase_ = Phase::have_section;
      return ToolCall::get_section_index(section);
    }
    case Phase::have_section: {
      std::size_t page = 0;
      try {
        page = locate_page(parse_toc(obs.last_result, numeric), obs.target_key);
      } catch (const std::exception&) {
        return fall_back();
      }
      phase_ = Phase::scanning;  // the page read below is checked by the scanner
      return ToolCall::read_page(page);
    }
    case Phase::scanning:
      return scan_.step(obs);
  }
  return ToolCall::submit_answer("");
}

void ShortcutParams::validate() const {
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(familiarity) || !unit(hallucination_accuracy) || !unit(guess_fraction)) {
    throw std::invalid_argument("shortcut probabilities must be in [0, 1]");
  }
  if (free_text_tokens < 1) throw std::invalid_argument("free_text_tokens must be >= 1");
}

ParametricShortcutPolicy::ParametricShortcutPolicy(ShortcutParams params,
                                                   std::unique_ptr<Policy> base,
                                                   Guesser guesser, std::uint64_t seed)
    : params_(params), base_(std::move(base)), guesser_(std::move(guesser)), rng_(seed) {
  params_.validate();
  if (!base_) throw std::invalid_argument("shortcut policy needs a base policy");
}

ToolCall ParametricShortcutPolicy::step(const Observation& obs) {
  // Only results of the base policy's own calls reach the base policy.
  if (last_was_base_) base_pending_ = obs;
  if (bernoulli(rng_, params_.familiarity)) {
    last_was_base_ = false;
    if (bernoulli(rng_, params_.guess_fraction)) {
      return ToolCall::submit_answer(guesser_ ? guesser_(obs.target_key, rng_) : std::string());
    }
    return ToolCall::free_text(filler_text(obs.target_key, params_.free_text_tokens));
  }
  last_was_base_ = true;
  base_pending_.calls_made = obs.calls_made;
  return base_->step(base_pending_);
}

Guesser make_guesser(ContentKind kind, Key target, std::string answer, double accuracy) {
  return [kind, target = std::move(target), answer = std::move(answer), accuracy](
             const Key& key, Rng& rng) -> std::string {
    if (key == target && bernoulli(rng, accuracy)) return answer;
    switch (kind) {
      case ContentKind::hash: {
        std::string guess;
        do {
          guess.clear();
          for (int i = 0; i < 4; ++i) {
            guess.push_back(static_cast<char>('A' + std::uniform_int_distribution<int>(0, 25)(rng)));
          }
        } while (key == target && guess == answer);
        return guess;
      }
      case ContentKind::numeric:
        return key.is_number() ? std::to_string(key.number() + 1) : "0";
      case ContentKind::encyclopedia:
        return key.text() + " is a common word found in most dictionaries.";
    }
    return {};
  };
}

double default_hallucination_accuracy(ContentKind kind) {
  switch (kind) {
    case ContentKind::hash: return 0.0;
    case ContentKind::numeric: return 1.0;
    case ContentKind::encyclopedia: return 0.3;
  }
  return 0.0;
}

}  // namespace pagebound
