#pragma once

// Closed-form retrieval costs for page-bounded agents.
//
// Sequential access pays (N+1)/2 page reads in expectation and N in the
// worst case; a B-tree index of branching factor b pays ceil(log_b N) + 1.
// Expected costs are exact rationals; bounds use an exact integer log so
// exact powers of b are never misclassified.

#include <cstdint>

#include <boost/rational.hpp>

namespace pagebound::theory {

using Rational = boost::rational<std::int64_t>;

/// Token budget of one index entry against a page of `page_capacity` tokens.
struct CostParams {
  std::int64_t page_capacity = 0;     // C
  std::int64_t key_tokens = 0;        // per-entry key (or filename)
  std::int64_t separator_tokens = 0;  // separator key delimiting a child range
  std::int64_t entry_overhead = 0;    // delimiters, line breaks, page numbers
};

struct StoreShape {
  std::int64_t items = 0;             // M
  std::int64_t items_per_page = 10;   // P
  std::int64_t pages_per_section = 10;  // S

  /// N = ceil(M / P).
  std::int64_t pages() const;
  /// Throws std::invalid_argument unless M, P, S >= 1.
  void validate() const;
};

struct AccumulationShape {
  std::int64_t initial_pages = 0;  // N0
  std::int64_t steps = 1;          // T
  void validate() const;
};

/// floor(C / (key + separator + overhead)); throws when the result is below 2.
std::int64_t branching_factor(const CostParams& params);

/// (N+1)/2.
Rational expected_sequential_cost(std::int64_t pages);
std::int64_t worst_sequential_cost(std::int64_t pages);

/// Smallest k with base^k >= n.
std::int64_t ceil_log(std::int64_t n, std::int64_t base);

/// ceil(log_b N) + 1: index levels plus the data page.
std::int64_t indexed_cost_bound(std::int64_t pages, std::int64_t branching);

Rational separation_ratio(std::int64_t pages, std::int64_t branching);

/// Expected-case accumulation: sum over t = 1..T of (N0 + t + 1) / 2.
Rational cumulative_sequential_cost(const AccumulationShape& shape);

/// Sum over t = 1..T of indexed_cost_bound(N0 + t, b).
std::int64_t cumulative_indexed_cost(const AccumulationShape& shape,
                                     std::int64_t branching);

/// expected_sequential_cost(ceil(M / P)).
Rational predicted_flat_reads(const StoreShape& shape);

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

}  // namespace pagebound::theory
