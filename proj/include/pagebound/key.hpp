#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace pagebound {

enum class ContentKind { hash, numeric, encyclopedia };

std::string_view to_string(ContentKind kind);
ContentKind parse_content_kind(std::string_view text);

/// True when keys of this content kind are integers.
constexpr bool numeric_keys(ContentKind kind) {
  return kind != ContentKind::encyclopedia;
}

/// A store key. Integers compare numerically; words compare bytewise on
/// their lowercased form, so "Apple" and "apple" are the same key. All
/// integers order before all words, though a store never mixes the two.
class Key {
 public:
  Key() = default;
  explicit Key(std::int64_t number);
  explicit Key(std::string word);

  bool is_number() const { return std::holds_alternative<std::int64_t>(value_); }
  std::int64_t number() const;
  const std::string& word() const;

  /// Canonical text used on pages and in index ranges.
  std::string text() const;

  /// Parses key text. Throws std::invalid_argument on malformed integers.
  static Key parse(std::string_view text, bool numeric);

  friend std::strong_ordering operator<=>(const Key& a, const Key& b) {
    const auto* x = std::get_if<std::int64_t>(&a.value_);
    const auto* y = std::get_if<std::int64_t>(&b.value_);
    if (x && y) return *x <=> *y;
    if (x || y) return x ? std::strong_ordering::less : std::strong_ordering::greater;
    const int c = a.folded_.compare(b.folded_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend bool operator==(const Key& a, const Key& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  std::variant<std::int64_t, std::string> value_{std::int64_t{0}};
  std::string folded_;
};

}  // namespace pagebound
