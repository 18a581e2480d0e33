#include "pagebound/store.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "pagebound/rng.hpp"

namespace pagebound {
namespace {

constexpr std::int64_t kHashKeyMin = 1000;
constexpr std::int64_t kHashKeyMax = 9999;

void check_page(std::size_t n, std::size_t count) {
  if (n < 1 || n > count) {
    throw std::out_of_range("page " + std::to_string(n) + " out of range 1.." +
                            std::to_string(count));
  }
}

std::string random_letters(Rng& rng, int count) {
  std::uniform_int_distribution<int> letter(0, 25);
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<char>('A' + letter(rng)));
  return s;
}

}  // namespace

PageStore::PageStore(ContentKind kind, PageOrdering ordering,
                     theory::StoreShape shape, std::vector<std::vector<Item>> pages)
    : kind_(kind), ordering_(ordering), shape_(shape), items_(std::move(pages)) {
  text_.reserve(items_.size());
  ranges_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& page = items_[i];
    if (page.empty()) throw std::invalid_argument("empty page");
    ranges_.push_back({page.front().key, page.back().key});
    for (std::size_t j = 0; j < page.size(); ++j) {
      by_key_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  auto less = [this](Slot a, Slot b) { return item_at(a).key < item_at(b).key; };
  // pages from paginate() are internally sorted, so this is usually a no-op
  if (!std::is_sorted(by_key_.begin(), by_key_.end(), less)) {
    std::sort(by_key_.begin(), by_key_.end(), less);
  }
  auto dup = std::adjacent_find(by_key_.begin(), by_key_.end(), [this](Slot a, Slot b) {
    return item_at(a).key == item_at(b).key;
  });
  if (dup != by_key_.end()) {
    throw std::invalid_argument("duplicate key: " + item_at(*dup).key.text());
  }
  for (std::size_t n = 1; n <= items_.size(); ++n) {
    std::string text = "PAGE " + std::to_string(n) + " OF " +
                       std::to_string(items_.size()) + "\n";
    for (const auto& item : items_[n - 1]) {
      text += render_item_line(kind_, item);
      text += '\n';
    }
    text_.push_back(std::move(text));
  }
}

const std::string& PageStore::page_text(std::size_t n) const {
  check_page(n, text_.size());
  return text_[n - 1];
}

const KeyRange& PageStore::page_range(std::size_t n) const {
  check_page(n, ranges_.size());
  return ranges_[n - 1];
}

const std::vector<Item>& PageStore::page_items(std::size_t n) const {
  check_page(n, items_.size());
  return items_[n - 1];
}

std::optional<PageStore::Slot> PageStore::find(const Key& key) const {
  auto it = std::lower_bound(by_key_.begin(), by_key_.end(), key,
                             [this](Slot s, const Key& k) { return item_at(s).key < k; });
  if (it == by_key_.end() || !(item_at(*it).key == key)) return std::nullopt;
  return *it;
}

const std::string* PageStore::answer(const Key& key) const {
  auto slot = find(key);
  return slot ? &item_at(*slot).value : nullptr;
}

std::optional<std::size_t> PageStore::page_of(const Key& key) const {
  auto slot = find(key);
  if (!slot) return std::nullopt;
  return slot->page + 1;
}

std::vector<Item> generate_items(const ContentSpec& spec, std::int64_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("item count must be >= 1");
  std::vector<Item> items;
  items.reserve(static_cast<std::size_t>(count));
  switch (spec.kind) {
    case ContentKind::hash: {
      const std::int64_t space = kHashKeyMax - kHashKeyMin + 1;
      if (count > space) {
        throw std::invalid_argument("hash content supports at most 9000 items");
      }
      Rng rng(seed);
      // Floyd's sampling of `count` distinct offsets into the key space.
      std::vector<char> taken(static_cast<std::size_t>(space), 0);
      std::vector<std::int64_t> keys;
      keys.reserve(static_cast<std::size_t>(count));
      for (std::int64_t j = space - count; j < space; ++j) {
        std::int64_t t = std::uniform_int_distribution<std::int64_t>(0, j)(rng);
        if (taken[static_cast<std::size_t>(t)]) t = j;
        taken[static_cast<std::size_t>(t)] = 1;
        keys.push_back(t);
      }
      std::sort(keys.begin(), keys.end());
      for (auto k : keys) items.push_back({Key(kHashKeyMin + k), random_letters(rng, 4)});
      break;
    }
    case ContentKind::numeric:
      for (std::int64_t k = 1; k <= count; ++k) items.push_back({Key(k), std::to_string(k)});
      break;
    case ContentKind::encyclopedia: {
      std::vector<Item> corpus = spec.corpus_path ? load_corpus_jsonl(*spec.corpus_path)
                                                  : bundled_encyclopedia();
      if (count > static_cast<std::int64_t>(corpus.size())) {
        throw std::invalid_argument("encyclopedia corpus holds only " +
                                    std::to_string(corpus.size()) + " entries");
      }
      items.assign(corpus.begin(), corpus.begin() + count);
      break;
    }
  }
  return items;
}

PageStore paginate(ContentKind kind, std::vector<Item> items,
                   std::int64_t items_per_page, PageOrdering ordering,
                   std::uint64_t seed, std::int64_t pages_per_section) {
  theory::StoreShape shape{static_cast<std::int64_t>(items.size()), items_per_page,
                           pages_per_section};
  shape.validate();
  auto by_key = [](const Item& a, const Item& b) { return a.key < b.key; };
  if (!std::is_sorted(items.begin(), items.end(), by_key)) {
    std::sort(items.begin(), items.end(), by_key);
  }
  std::vector<std::vector<Item>> pages;
  pages.reserve(static_cast<std::size_t>(shape.pages()));
  for (std::size_t i = 0; i < items.size(); i += static_cast<std::size_t>(items_per_page)) {
    auto end = std::min(items.size(), i + static_cast<std::size_t>(items_per_page));
    pages.emplace_back(std::make_move_iterator(items.begin() + i),
                       std::make_move_iterator(items.begin() + end));
  }
  if (ordering == PageOrdering::random) {
    Rng rng(seed);
    std::shuffle(pages.begin(), pages.end(), rng);
  }
  return PageStore(kind, ordering, shape, std::move(pages));
}

std::string render_item_line(ContentKind kind, const Item& item) {
  if (kind == ContentKind::numeric) return "Item " + item.key.text() + ": " + item.value;
  return item.key.text() + ": " + item.value;
}

std::string render_page(const PageStore& store, std::size_t n) {
  return store.page_text(n);
}

std::pair<Key, std::string> pick_target(const PageStore& store, std::uint64_t seed) {
  if (store.item_count() == 0) throw std::invalid_argument("empty store");
  Rng rng(seed);
  const auto& item = store.item_by_rank(
      std::uniform_int_distribution<std::size_t>(0, store.item_count() - 1)(rng));
  return {item.key, item.value};
}

std::pair<Key, std::string> pick_target_on_page(const PageStore& store, std::size_t n,
                                                std::uint64_t seed) {
  const auto& page = store.page_items(n);
  Rng rng(seed);
  const auto& item = page[std::uniform_int_distribution<std::size_t>(0, page.size() - 1)(rng)];
  return {item.key, item.value};
}

std::vector<Item> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus: " + path.string());
  std::vector<Item> items;
  std::set<Key> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(where + "invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("key") || !obj.contains("value") ||
        !obj["key"].is_string() || !obj["value"].is_string()) {
      throw std::runtime_error(where + "expected string fields \"key\" and \"value\"");
    }
    auto key = obj["key"].get<std::string>();
    auto value = obj["value"].get<std::string>();
    if (key.empty() || value.empty()) throw std::runtime_error(where + "empty key or value");
    // Keys must survive the page and index line formats.
    if (key.find('\n') != std::string::npos || key.find(": ") != std::string::npos ||
        key.find("..") != std::string::npos || value.find('\n') != std::string::npos) {
      throw std::runtime_error(where + "key or value not representable on a page line");
    }
    Key k(std::move(key));
    if (!seen.insert(k).second) throw std::runtime_error(where + "duplicate key " + k.text());
    items.push_back({std::move(k), std::move(value)});
  }
  auto by_key = [](const Item& a, const Item& b) { return a.key < b.key; };
  if (!std::is_sorted(items.begin(), items.end(), by_key)) {
    std::sort(items.begin(), items.end(), by_key);
  }
  return items;
}

}  // namespace pagebound
