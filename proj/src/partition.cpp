#include "ubmat/partition.hpp"

#include "ubmat/errors.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace ubmat {

Partition::Partition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) {
    throw InvalidInput("partition must contain at least one block");
  }
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] < 2) {
      throw InvalidInput("partition block " + std::to_string(k + 1) +
                         " has size " + std::to_string(sizes_[k]) +
                         "; every block needs at least 2 variables");
    }
    offsets_.push_back(offsets_.back() + sizes_[k]);
  }
}

Partition Partition::parse(const std::string& text) {
  std::vector<Index> sizes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(pos, end - pos);
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t\r\n") + 1);
    long long value = 0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() ||
        ptr != token.data() + token.size()) {
      throw InvalidInput("cannot parse partition '" + text +
                         "': expected comma-separated block sizes");
    }
    sizes.push_back(static_cast<Index>(value));
    pos = end + 1;
  }
  return Partition(std::move(sizes));
}

Index Partition::block_of(Index i) const {
  if (i < 0 || i >= dim()) throw InvalidInput("row index out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  return static_cast<Index>(it - offsets_.begin()) - 1;
}

Eigen::VectorXd Partition::sizes_vector() const {
  Eigen::VectorXd out(blocks());
  for (Index k = 0; k < blocks(); ++k) out(k) = static_cast<double>(size(k));
  return out;
}

std::string Partition::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (k) os << ',';
    os << sizes_[k];
  }
  return os.str();
}

}  // namespace ubmat
