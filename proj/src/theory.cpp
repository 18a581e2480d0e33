#include "pagebound/theory.hpp"

#include <stdexcept>
#include <string>

namespace pagebound::theory {
namespace {

void require_pages(std::int64_t pages) {
  if (pages < 1) throw std::invalid_argument("page count must be >= 1");
}

void require_branching(std::int64_t branching) {
  if (branching < 2) throw std::invalid_argument("branching factor below 2");
}

}  // namespace

std::int64_t StoreShape::pages() const {
  validate();
  return (items + items_per_page - 1) / items_per_page;
}

void StoreShape::validate() const {
  if (items < 1) throw std::invalid_argument("item count M must be >= 1");
  if (items_per_page < 1) throw std::invalid_argument("items per page P must be >= 1");
  if (pages_per_section < 1) throw std::invalid_argument("pages per section S must be >= 1");
}

void AccumulationShape::validate() const {
  if (initial_pages < 0) throw std::invalid_argument("N0 must be >= 0");
  if (steps < 1) throw std::invalid_argument("T must be >= 1");
}

std::int64_t branching_factor(const CostParams& p) {
  if (p.page_capacity < 1 || p.key_tokens < 1 || p.separator_tokens < 1 ||
      p.entry_overhead < 1) {
    throw std::invalid_argument("cost parameters must all be >= 1");
  }
  const std::int64_t b =
      p.page_capacity / (p.key_tokens + p.separator_tokens + p.entry_overhead);
  require_branching(b);
  return b;
}

Rational expected_sequential_cost(std::int64_t pages) {
  require_pages(pages);
  return Rational(pages + 1, 2);
}

std::int64_t worst_sequential_cost(std::int64_t pages) {
  require_pages(pages);
  return pages;
}

std::int64_t ceil_log(std::int64_t n, std::int64_t base) {
  require_pages(n);
  require_branching(base);
  std::int64_t k = 0;
  std::int64_t reach = 1;
  while (reach < n) {
    // reach * base cannot overflow before it passes n when n fits in int64
    if (reach > n / base) {
      ++k;
      break;
    }
    reach *= base;
    ++k;
  }
  return k;
}

std::int64_t indexed_cost_bound(std::int64_t pages, std::int64_t branching) {
  return ceil_log(pages, branching) + 1;
}

Rational separation_ratio(std::int64_t pages, std::int64_t branching) {
  return expected_sequential_cost(pages) /
         Rational(indexed_cost_bound(pages, branching));
}

Rational cumulative_sequential_cost(const AccumulationShape& shape) {
  shape.validate();
  const std::int64_t t = shape.steps;
  // sum_{t=1..T} (N0 + 1 + t) = T (N0 + 1) + T (T + 1) / 2
  return Rational(2 * t * (shape.initial_pages + 1) + t * (t + 1), 4);
}

std::int64_t cumulative_indexed_cost(const AccumulationShape& shape,
                                     std::int64_t branching) {
  shape.validate();
  require_branching(branching);
  std::int64_t total = 0;
  for (std::int64_t t = 1; t <= shape.steps; ++t) {
    total += indexed_cost_bound(shape.initial_pages + t, branching);
  }
  return total;
}

Rational predicted_flat_reads(const StoreShape& shape) {
  return expected_sequential_cost(shape.pages());
}

}  // namespace pagebound::theory
