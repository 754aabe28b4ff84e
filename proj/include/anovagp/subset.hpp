#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anovagp {

/// A group of input indices (0-based internally, printed 1-based).
class Subset {
public:
  static constexpr int kMaxDim = 63;

  Subset() = default;
  Subset(std::initializer_list<int> indices);
  static Subset from_indices(std::span<const int> indices);
  static Subset from_mask(std::uint64_t mask) { return Subset(mask); }
  static Subset full(int dim);
  /// Parses "{1,3}" or "1,3"; indices are 1-based.
  static Subset parse(std::string_view text);

  bool contains(int index) const { return index >= 0 && index < 64 && ((mask_ >> index) & 1U); }
  int size() const;
  bool empty() const { return mask_ == 0; }
  std::uint64_t mask() const { return mask_; }
  std::vector<int> indices() const;
  /// Largest index + 1, or 0 for the empty set.
  int span_dim() const;
  Subset complement(int dim) const;

  /// "{1,3}" (1-based).
  std::string label() const;

  friend bool operator==(const Subset&, const Subset&) = default;
  friend std::strong_ordering operator<=>(const Subset& a, const Subset& b);

private:
  explicit Subset(std::uint64_t mask) : mask_(mask) {}
  std::uint64_t mask_ = 0;
};

/// All nonempty subsets of {0..dim-1}, ordered by size then lexicographically
/// ({1},{2},{3},{1,2},{1,3},{2,3},{1,2,3} for dim 3).
std::vector<Subset> all_subsets(int dim);
std::vector<Subset> first_order_subsets(int dim);

/// Throws ConfigError when `u` is empty or references an index >= dim.
void require_valid(const Subset& u, int dim);

} // namespace anovagp
