#pragma once

// FIFO on a power-of-two ring buffer; grows by doubling, never shrinks.

#include <cstddef>
#include <utility>
#include <vector>

namespace tsn {

template <class T>
class RingQueue {
 public:
  bool empty() const { return head_ == tail_; }
  std::size_t size() const { return tail_ - head_; }

  T& front() { return buf_[head_ & mask_]; }
  const T& front() const { return buf_[head_ & mask_]; }

  void push_back(T v) {
    if (size() == buf_.size()) grow();
    buf_[tail_ & mask_] = std::move(v);
    ++tail_;
  }

  void pop_front() { ++head_; }

 private:
  void grow() {
    const std::size_t n = buf_.empty() ? 16 : buf_.size() * 2;
    std::vector<T> next(n);
    for (std::size_t i = 0; i < size(); ++i) next[i] = std::move(buf_[(head_ + i) & mask_]);
    tail_ = size();
    head_ = 0;
    buf_ = std::move(next);
    mask_ = n - 1;
  }

  std::vector<T> buf_;
  std::size_t mask_ = 0;
  std::size_t head_ = 0;
  std::size_t tail_ = 0;
};

}  // namespace tsn
