#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pagebound/key.hpp"
#include "pagebound/theory.hpp"

namespace pagebound {

struct Item {
  Key key;
  std::string value;
};

struct ContentSpec {
  ContentKind kind = ContentKind::hash;
  /// JSONL corpus for encyclopedia content; the bundled corpus when empty.
  std::optional<std::filesystem::path> corpus_path;
};

enum class PageOrdering { random, sorted };

/// Closed key interval.
struct KeyRange {
  Key lo;
  Key hi;
  bool contains(const Key& k) const { return lo <= k && k <= hi; }
  friend bool operator==(const KeyRange&, const KeyRange&) = default;
};

/// One trial's rendered pages plus the ground-truth answer key. Immutable.
class PageStore {
 public:
  PageStore(ContentKind kind, PageOrdering ordering, theory::StoreShape shape,
            std::vector<std::vector<Item>> pages);

  ContentKind kind() const { return kind_; }
  PageOrdering ordering() const { return ordering_; }
  const theory::StoreShape& shape() const { return shape_; }
  std::size_t page_count() const { return text_.size(); }

  /// 1-based. Throws std::out_of_range.
  const std::string& page_text(std::size_t n) const;
  const KeyRange& page_range(std::size_t n) const;
  const std::vector<Item>& page_items(std::size_t n) const;
  const std::vector<KeyRange>& ranges() const { return ranges_; }

  /// Ground-truth value for `key`, or nullptr when the store lacks it.
  const std::string* answer(const Key& key) const;
  /// Page holding `key`, or nullopt.
  std::optional<std::size_t> page_of(const Key& key) const;
  std::size_t item_count() const { return by_key_.size(); }
  /// The i-th item in ascending key order, 0-based.
  const Item& item_by_rank(std::size_t i) const { return item_at(by_key_.at(i)); }

 private:
  ContentKind kind_;
  PageOrdering ordering_;
  theory::StoreShape shape_;
  std::vector<std::vector<Item>> items_;
  std::vector<std::string> text_;
  std::vector<KeyRange> ranges_;
  struct Slot {
    std::uint32_t page;  // 0-based
    std::uint32_t index;
  };
  const Item& item_at(Slot s) const { return items_[s.page][s.index]; }
  std::optional<Slot> find(const Key& key) const;
  std::vector<Slot> by_key_;  // every item, ascending key
};

/// Generates M items. Hash keys are drawn without replacement from
/// 1000..9999 with random [A-Z]{4} values; numeric item k maps to "k";
/// encyclopedia takes the first M corpus entries in key order.
std::vector<Item> generate_items(const ContentSpec& spec, std::int64_t count,
                                 std::uint64_t seed);

/// Sorts by key, chunks P per page, then shuffles page order when random.
PageStore paginate(ContentKind kind, std::vector<Item> items,
                   std::int64_t items_per_page, PageOrdering ordering,
                   std::uint64_t seed, std::int64_t pages_per_section = 10);

std::string render_item_line(ContentKind kind, const Item& item);
std::string render_page(const PageStore& store, std::size_t n);

std::pair<Key, std::string> pick_target(const PageStore& store, std::uint64_t seed);
/// Uniform target among the items of page n (adversarial placement).
std::pair<Key, std::string> pick_target_on_page(const PageStore& store,
                                                std::size_t n, std::uint64_t seed);

/// Bundled encyclopedia corpus: English headwords with templated facts,
/// sorted by key.
const std::vector<Item>& bundled_encyclopedia();

/// One JSON object per line with string fields "key" and "value".
/// Throws std::runtime_error naming the offending line.
std::vector<Item> load_corpus_jsonl(const std::filesystem::path& path);

}  // namespace pagebound
