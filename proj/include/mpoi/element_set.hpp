#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mpoi {

/// Subset of the ground elements 0..n-1.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::size_t ground_size) : bits_(ground_size, false) {}
  ElementSet(std::size_t ground_size, std::initializer_list<std::size_t> members);

  static ElementSet from_mask(std::size_t ground_size, std::uint64_t mask);
  static ElementSet full(std::size_t ground_size);

  std::size_t ground_size() const noexcept { return bits_.size(); }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool contains(std::size_t element) const;
  void insert(std::size_t element);
  void erase(std::size_t element);
  ElementSet with(std::size_t element) const;

  std::vector<std::size_t> elements() const;
  std::uint64_t mask() const;  // requires ground_size <= 64
  std::string to_string() const;  // "{0,2,5}"

  friend bool operator==(const ElementSet& a, const ElementSet& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

}  // namespace mpoi
