#pragma once

#include <array>
#include <random>
#include <stdexcept>
#include <vector>

#include "drlnav/mlp.hpp"

namespace drlnav {

/// One interaction in the discrete stage. States are grid indices; the
/// one-hot encoding is materialized only when a batch is assembled.
struct DiscreteTransition {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
    bool terminated = false;
};

/// One interaction in the continuous stage; action components lie in [-1,1].
struct ContTransition {
    std::array<double, 2> state{};
    std::array<double, 2> action{};
    double reward = 0.0;
    std::array<double, 2> next_state{};
    bool terminated = false;
};

/// Bounded FIFO store with uniform mini-batch sampling (with replacement).
/// Insertion beyond capacity evicts the oldest entry. Sampling never mutates
/// the buffer.
template <class T>
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) throw std::invalid_argument("replay: capacity must be positive");
        entries_.reserve(capacity_);
    }

    void push(const T& t) {
        if (entries_.size() < capacity_) {
            entries_.push_back(t);
        } else {
            entries_[head_] = t;
            head_ = (head_ + 1) % capacity_;
        }
    }

    size_t size() const { return entries_.size(); }
    size_t capacity() const { return capacity_; }

    /// k-th oldest entry, k in [0, size).
    const T& at_fifo(size_t k) const {
        if (k >= entries_.size()) throw std::out_of_range("replay: index out of range");
        return entries_[(head_ + k) % entries_.size()];
    }

    std::vector<T> sample(size_t n, Rng& rng) const {
        if (n == 0 || entries_.size() < n)
            throw std::invalid_argument("replay: not enough entries to sample");
        std::uniform_int_distribution<size_t> pick(0, entries_.size() - 1);
        std::vector<T> batch;
        batch.reserve(n);
        for (size_t i = 0; i < n; ++i) batch.push_back(entries_[pick(rng)]);
        return batch;
    }

private:
    size_t capacity_;
    std::vector<T> entries_;
    size_t head_ = 0;  // index of the oldest entry once full
};

}  // namespace drlnav
