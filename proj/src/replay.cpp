#include "oac/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace oac {

bool is_finite(const Transition& t) {
  return t.s.allFinite() && t.a.allFinite() && std::isfinite(t.r) &&
         t.s_next.allFinite();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0)
    throw std::invalid_argument("replay: capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (!is_finite(t))
    throw std::invalid_argument("replay push: non-finite transition");
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
  } else {
    storage_[cursor_] = t;
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (storage_.empty()) throw std::runtime_error("replay sample: empty buffer");
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(storage_[rng.uniform_index(storage_.size())]);
  return out;
}

}  // namespace oac
