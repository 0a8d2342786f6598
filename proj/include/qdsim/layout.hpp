#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdsim {

// Default cap on the number of amplitudes a dense state may hold.
// Overridable per layout; exceeding the cap is a recoverable error.
inline constexpr std::int64_t kDefaultDimensionCap = std::int64_t{1} << 22;

// Ordered list of local Hilbert-space dimensions of a tensor-product space.
// Indexing is row-major: the leftmost subsystem is the most significant digit
// of a global index.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;

  explicit SubsystemLayout(std::vector<int> dims,
                           std::vector<std::string> labels = {},
                           std::int64_t dimension_cap = kDefaultDimensionCap)
      : dims_(std::move(dims)), labels_(std::move(labels)), cap_(dimension_cap) {
    if (dims_.empty()) throw std::invalid_argument("SubsystemLayout: no subsystems");
    if (!labels_.empty() && labels_.size() != dims_.size())
      throw std::invalid_argument("SubsystemLayout: label count mismatch");
    std::int64_t total = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("SubsystemLayout: every dim must be >= 2");
      if (total > cap_ / d)
        throw std::invalid_argument("SubsystemLayout: dimension cap exceeded (" +
                                    std::to_string(cap_) + " amplitudes)");
      total *= d;
    }
    total_ = total;
  }

  static SubsystemLayout qubits(int n, std::int64_t cap = kDefaultDimensionCap) {
    return SubsystemLayout(std::vector<int>(static_cast<std::size_t>(n), 2), {}, cap);
  }

  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::int64_t total_dimension() const { return total_; }
  std::int64_t dimension_cap() const { return cap_; }

  // strides for row-major global indexing (rightmost subsystem has stride 1)
  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> s(dims_.size());
    std::int64_t acc = 1;
    for (int k = subsystem_count() - 1; k >= 0; --k) {
      s[static_cast<std::size_t>(k)] = acc;
      acc *= dims_[static_cast<std::size_t>(k)];
    }
    return s;
  }

  std::int64_t product_dim(const std::vector<int>& subsystems) const {
    std::int64_t p = 1;
    for (int k : subsystems) p *= dim(k);
    return p;
  }

  bool operator==(const SubsystemLayout& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::int64_t cap_ = kDefaultDimensionCap;
  std::int64_t total_ = 0;
};

}  // namespace qdsim
