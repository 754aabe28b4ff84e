#include "anovagp/subset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "anovagp/errors.hpp"

namespace anovagp {

Subset::Subset(std::initializer_list<int> indices)
    : Subset(from_indices(std::span<const int>(indices.begin(), indices.size()))) {}

Subset Subset::from_indices(std::span<const int> indices) {
  std::uint64_t mask = 0;
  for (int i : indices) {
    if (i < 0 || i > kMaxDim) {
      throw ConfigError("subset index out of range: " + std::to_string(i));
    }
    mask |= (std::uint64_t{1} << i);
  }
  return Subset(mask);
}

Subset Subset::full(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw ConfigError("unsupported dimension " + std::to_string(dim));
  }
  return Subset(dim == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << dim) - 1);
}

Subset Subset::parse(std::string_view text) {
  std::vector<int> indices;
  int current = -1;
  for (char c : text) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      current = (current < 0 ? 0 : current * 10) + (c - '0');
    } else if (c == ',' || c == ' ' || c == '{' || c == '}') {
      if (current >= 0) {
        indices.push_back(current - 1);
        current = -1;
      }
    } else {
      throw ConfigError("invalid subset text '" + std::string(text) + "'");
    }
  }
  if (current >= 0) {
    indices.push_back(current - 1);
  }
  if (indices.empty()) {
    throw ConfigError("empty subset '" + std::string(text) + "'");
  }
  return from_indices(indices);
}

int Subset::size() const { return std::popcount(mask_); }

std::vector<int> Subset::indices() const {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i) {
    if (contains(i)) {
      out.push_back(i);
    }
  }
  return out;
}

int Subset::span_dim() const { return mask_ == 0 ? 0 : 64 - std::countl_zero(mask_); }

Subset Subset::complement(int dim) const { return Subset(full(dim).mask_ & ~mask_); }

std::string Subset::label() const {
  std::string out = "{";
  bool first = true;
  for (int i : indices()) {
    if (!first) {
      out += ',';
    }
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

std::strong_ordering operator<=>(const Subset& a, const Subset& b) {
  if (auto c = a.size() <=> b.size(); c != 0) {
    return c;
  }
  // Lexicographic on sorted index lists.
  const auto ia = a.indices();
  const auto ib = b.indices();
  return std::lexicographical_compare_three_way(ia.begin(), ia.end(), ib.begin(), ib.end());
}

std::vector<Subset> all_subsets(int dim) {
  if (dim < 1 || dim > 20) {
    throw ConfigError("cannot enumerate subsets for dimension " + std::to_string(dim));
  }
  std::vector<Subset> out;
  const std::uint64_t count = std::uint64_t{1} << dim;
  out.reserve(count - 1);
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    out.push_back(Subset::from_mask(mask));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Subset> first_order_subsets(int dim) {
  std::vector<Subset> out;
  for (int i = 0; i < dim; ++i) {
    out.push_back(Subset{i});
  }
  return out;
}

void require_valid(const Subset& u, int dim) {
  if (u.empty()) {
    throw ConfigError("subset must be nonempty");
  }
  if (u.span_dim() > dim) {
    throw ConfigError("subset " + u.label() + " exceeds dimension " + std::to_string(dim));
  }
}

} // namespace anovagp
