#pragma once

// Lookup structures over a sorted PageStore: a flat table of contents (one
// entry per page), its corrupted twin, and a two-level deep index (a master
// table over sections of S pages plus one table per section).
//
// Rendered formats, one entry per line after a header:
//   INDEX: <count> pages            page <n>: <lo>..<hi>
//   SECTION <s> INDEX: <count> pages page <n>: <lo>..<hi>
//   MASTER INDEX: <count> sections  section <s>: <lo>..<hi>
// Ranges are closed on both ends.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pagebound/store.hpp"

namespace pagebound {

struct IndexEntry {
  std::size_t page = 0;
  KeyRange range;
};

/// Entries ascend by range.lo. `section` is 0 for a whole-store table.
struct FlatToc {
  std::vector<IndexEntry> entries;
  std::size_t section = 0;
};

struct SectionEntry {
  std::size_t section = 0;
  KeyRange range;
};

struct DeepIndex {
  std::vector<SectionEntry> master;
  std::vector<FlatToc> sections;  // sections[s - 1]
  std::size_t pages_per_section = 10;
};

/// Throws std::invalid_argument for random-ordered stores.
FlatToc build_flat_toc(const PageStore& store);
/// Table over per-page ranges in page order; ranges must ascend.
FlatToc build_flat_toc(std::span<const KeyRange> ranges);

/// Reassigns ranges along a single random cycle so no page keeps its own
/// range. Deterministic under `seed`. Throws for fewer than two entries.
FlatToc corrupt_toc(const FlatToc& toc, std::uint64_t seed);

DeepIndex build_deep_index(const PageStore& store, std::size_t pages_per_section);

/// Page whose range holds `key`; in a gap, the entry with the greatest
/// lo <= key. Throws std::out_of_range below the first lo.
std::size_t locate_page(const FlatToc& toc, const Key& key);
std::size_t locate_section(const DeepIndex& index, const Key& key);
std::size_t locate_section(std::span<const SectionEntry> master, const Key& key);

std::string render_toc(const FlatToc& toc);
std::string render_master(const DeepIndex& index);

/// Inverse of render_toc. Throws std::invalid_argument on malformed text.
FlatToc parse_toc(std::string_view text, bool numeric_keys);
std::vector<SectionEntry> parse_master(std::string_view text, bool numeric_keys);

}  // namespace pagebound
