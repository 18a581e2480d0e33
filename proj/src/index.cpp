#include "pagebound/index.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include "pagebound/rng.hpp"

namespace pagebound {
namespace {

template <typename Entry>
std::size_t locate_entry(std::span<const Entry> entries, const Key& key) {
  // first entry with lo > key; the answer is the one before it
  auto it = std::upper_bound(entries.begin(), entries.end(), key,
                             [](const Key& k, const Entry& e) { return k < e.range.lo; });
  if (it == entries.begin()) throw std::out_of_range("key out of range: " + key.text());
  return static_cast<std::size_t>(std::prev(it) - entries.begin());
}

std::string range_text(const KeyRange& r) { return r.lo.text() + ".." + r.hi.text(); }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed number: " + std::string(s));
  }
  return v;
}

// "<label> <n>: <lo>..<hi>"
std::pair<std::size_t, KeyRange> parse_entry_line(std::string_view line,
                                                  std::string_view label, bool numeric) {
  if (!line.starts_with(label) || line.size() <= label.size() ||
      line[label.size()] != ' ') {
    throw std::invalid_argument("malformed index line: " + std::string(line));
  }
  line.remove_prefix(label.size() + 1);
  auto colon = line.find(": ");
  auto dots = line.find("..", colon == std::string_view::npos ? 0 : colon);
  if (colon == std::string_view::npos || dots == std::string_view::npos) {
    throw std::invalid_argument("malformed index line: " + std::string(line));
  }
  auto number = parse_count(line.substr(0, colon));
  auto lo = line.substr(colon + 2, dots - colon - 2);
  auto hi = line.substr(dots + 2);
  return {number, KeyRange{Key::parse(lo, numeric), Key::parse(hi, numeric)}};
}

}  // namespace

FlatToc build_flat_toc(const PageStore& store) {
  if (store.ordering() != PageOrdering::sorted) {
    throw std::invalid_argument("a table of contents requires sorted pages");
  }
  return build_flat_toc(store.ranges());
}

FlatToc build_flat_toc(std::span<const KeyRange> ranges) {
  FlatToc toc;
  toc.entries.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].hi < ranges[i].lo) throw std::invalid_argument("inverted key range");
    if (i > 0 && !(ranges[i - 1].hi < ranges[i].lo)) {
      throw std::invalid_argument("page ranges overlap or are out of order");
    }
    toc.entries.push_back({i + 1, ranges[i]});
  }
  return toc;
}

FlatToc corrupt_toc(const FlatToc& toc, std::uint64_t seed) {
  const std::size_t n = toc.entries.size();
  if (n < 2) throw std::invalid_argument("corruption needs at least two index entries");
  // Sattolo: a uniform random n-cycle, hence a derangement.
  std::vector<std::size_t> cycle(n);
  std::iota(cycle.begin(), cycle.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    auto j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::swap(cycle[i], cycle[j]);
  }
  FlatToc out;
  out.section = toc.section;
  out.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.entries.push_back({toc.entries[i].page, toc.entries[cycle[i]].range});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.range.lo < b.range.lo; });
  return out;
}

DeepIndex build_deep_index(const PageStore& store, std::size_t pages_per_section) {
  if (pages_per_section < 1) throw std::invalid_argument("pages per section must be >= 1");
  FlatToc all = build_flat_toc(store);
  DeepIndex index;
  index.pages_per_section = pages_per_section;
  const std::size_t n = all.entries.size();
  for (std::size_t first = 0, s = 1; first < n; first += pages_per_section, ++s) {
    const std::size_t last = std::min(n, first + pages_per_section);
    FlatToc section;
    section.section = s;
    section.entries.assign(all.entries.begin() + first, all.entries.begin() + last);
    index.master.push_back(
        {s, KeyRange{section.entries.front().range.lo, section.entries.back().range.hi}});
    index.sections.push_back(std::move(section));
  }
  return index;
}

std::size_t locate_page(const FlatToc& toc, const Key& key) {
  std::span<const IndexEntry> entries(toc.entries);
  return entries[locate_entry(entries, key)].page;
}

std::size_t locate_section(std::span<const SectionEntry> master, const Key& key) {
  return master[locate_entry(master, key)].section;
}

std::size_t locate_section(const DeepIndex& index, const Key& key) {
  return locate_section(std::span<const SectionEntry>(index.master), key);
}

std::string render_toc(const FlatToc& toc) {
  std::string out = toc.section == 0 ? "INDEX: " : "SECTION " + std::to_string(toc.section) + " INDEX: ";
  out += std::to_string(toc.entries.size()) + " pages\n";
  for (const auto& e : toc.entries) {
    out += "page " + std::to_string(e.page) + ": " + range_text(e.range) + "\n";
  }
  return out;
}

std::string render_master(const DeepIndex& index) {
  std::string out = "MASTER INDEX: " + std::to_string(index.master.size()) + " sections\n";
  for (const auto& e : index.master) {
    out += "section " + std::to_string(e.section) + ": " + range_text(e.range) + "\n";
  }
  return out;
}

FlatToc parse_toc(std::string_view text, bool numeric_keys) {
  auto lines = split_lines(text);
  if (lines.empty()) throw std::invalid_argument("empty index text");
  FlatToc toc;
  std::string_view header = lines.front();
  if (header.starts_with("SECTION ")) {
    auto sp = header.find(' ', 8);
    if (sp == std::string_view::npos) throw std::invalid_argument("malformed section header");
    toc.section = parse_count(header.substr(8, sp - 8));
  } else if (!header.starts_with("INDEX: ")) {
    throw std::invalid_argument("not an index: " + std::string(header));
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto [page, range] = parse_entry_line(lines[i], "page", numeric_keys);
    toc.entries.push_back({page, std::move(range)});
  }
  std::sort(toc.entries.begin(), toc.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.range.lo < b.range.lo; });
  return toc;
}

std::vector<SectionEntry> parse_master(std::string_view text, bool numeric_keys) {
  auto lines = split_lines(text);
  if (lines.empty() || !lines.front().starts_with("MASTER INDEX: ")) {
    throw std::invalid_argument("not a master index");
  }
  std::vector<SectionEntry> master;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto [section, range] = parse_entry_line(lines[i], "section", numeric_keys);
    master.push_back({section, std::move(range)});
  }
  std::sort(master.begin(), master.end(),
            [](const SectionEntry& a, const SectionEntry& b) { return a.range.lo < b.range.lo; });
  return master;
}

}  // namespace pagebound
