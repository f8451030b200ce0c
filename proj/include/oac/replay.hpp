#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "oac/rng.hpp"

namespace oac {

using Eigen::VectorXd;

struct Transition {
  VectorXd s;
  VectorXd a;
  double r = 0.0;
  VectorXd s_next;
  bool done = false;
};

bool is_finite(const Transition& t);

// Fixed-capacity ring store with uniform with-replacement sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Overwrites the oldest entry once full. Throws on non-finite fields.
  void push(const Transition& t);

  // n i.i.d. uniform draws over the stored entries. Throws if empty.
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return storage_.at(i); }

 private:
  std::vector<Transition> storage_;
  std::size_t capacity_;
  std::size_t cursor_ = 0;
};

}  // namespace oac
