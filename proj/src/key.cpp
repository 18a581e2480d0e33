#include "pagebound/key.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace pagebound {

std::string_view to_string(ContentKind kind) {
  switch (kind) {
    case ContentKind::hash: return "hash";
    case ContentKind::numeric: return "numeric";
    case ContentKind::encyclopedia: return "encyclopedia";
  }
  return "unknown";
}

ContentKind parse_content_kind(std::string_view text) {
  if (text == "hash") return ContentKind::hash;
  if (text == "numeric") return ContentKind::numeric;
  if (text == "encyclopedia") return ContentKind::encyclopedia;
  throw std::invalid_argument("unknown content kind: " + std::string(text));
}

Key::Key(std::int64_t number) : value_(number) {}

Key::Key(std::string word) : value_(std::move(word)) {
  folded_ = std::get<std::string>(value_);
  std::transform(folded_.begin(), folded_.end(), folded_.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
}

std::int64_t Key::number() const {
  if (!is_number()) throw std::logic_error("key is not a number");
  return std::get<std::int64_t>(value_);
}

const std::string& Key::word() const {
  if (is_number()) throw std::logic_error("key is not a word");
  return std::get<std::string>(value_);
}

std::string Key::text() const {
  return is_number() ? std::to_string(number()) : word();
}

Key Key::parse(std::string_view text, bool numeric) {
  if (!numeric) return Key(std::string(text));
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("malformed integer key: " + std::string(text));
  }
  return Key(value);
}

}  // namespace pagebound
