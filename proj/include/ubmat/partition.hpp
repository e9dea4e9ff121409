#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ubmat {

using Index = Eigen::Index;

/// Block sizes (p_1, ..., p_K) of a uniform-block layout.
///
/// Every block must hold at least two variables; with p_k = 1 the split of a
/// diagonal entry into its A and B parts is not identifiable.
class Partition {
 public:
  explicit Partition(std::vector<Index> sizes);

  /// Parses "2,3,4".
  static Partition parse(const std::string& text);

  Index blocks() const noexcept { return static_cast<Index>(sizes_.size()); }
  Index dim() const noexcept { return offsets_.back(); }
  Index size(Index k) const { return sizes_[static_cast<std::size_t>(k)]; }
  /// First row of block k (0-based), i.e. p_1 + ... + p_{k-1}.
  Index offset(Index k) const { return offsets_[static_cast<std::size_t>(k)]; }
  /// Block containing row i.
  Index block_of(Index i) const;

  const std::vector<Index>& sizes() const noexcept { return sizes_; }
  /// Diagonal of P as a vector of doubles.
  Eigen::VectorXd sizes_vector() const;

  std::string to_string() const;

  friend bool operator==(const Partition& x, const Partition& y) {
    return x.sizes_ == y.sizes_;
  }
  friend bool operator!=(const Partition& x, const Partition& y) {
    return !(x == y);
  }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

}  // namespace ubmat
