#ifndef CLERAY_SUMMATION_HPP_
#define CLERAY_SUMMATION_HPP_

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace cleray {

/// Streaming pairwise summation. Values are folded like a binary counter, so the result is
/// independent of how the stream is chunked and the rounding error grows like log(n).
template <class T>
class PairwiseSum {
 public:
  void add(const T& v) {
    T carry = v;
    std::size_t level = 0;
    std::size_t n = count_;
    while (n & 1u) {
      carry = stack_[level] + carry;
      n >>= 1u;
      ++level;
    }
    if (level >= stack_.size()) stack_.resize(level + 1, T{});
    stack_[level] = carry;
    ++count_;
  }

  T value() const {
    T s{};
    bool first = true;
    std::size_t n = count_;
    for (std::size_t level = 0; n; ++level, n >>= 1u) {
      if (n & 1u) {
        s = first ? stack_[level] : stack_[level] + s;
        first = false;
      }
    }
    return s;
  }

  std::size_t count() const { return count_; }

 private:
  std::vector<T> stack_;
  std::size_t count_ = 0;
};

/// Pairwise sum of a block of parallel accumulators of fixed width.
template <class T>
class PairwiseSumVector {
 public:
  explicit PairwiseSumVector(std::size_t width = 0) : sums_(width) {}
  std::size_t size() const { return sums_.size(); }
  void add(std::size_t i, const T& v) { sums_[i].add(v); }
  T value(std::size_t i) const { return sums_[i].value(); }
  std::vector<T> values() const {
    std::vector<T> out(sums_.size());
    for (std::size_t i = 0; i < sums_.size(); ++i) out[i] = sums_[i].value();
    return out;
  }

 private:
  std::vector<PairwiseSum<T>> sums_;
};

}  // namespace cleray

#endif  // CLERAY_SUMMATION_HPP_
