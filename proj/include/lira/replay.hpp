#pragma once

#include "lira/array.hpp"
#include "lira/rng.hpp"

#include <vector>

namespace lira::replay {

using ad::Array;

/// One stored experience record; no gradient history is kept.
struct Transition {
    std::vector<double> s;
    std::vector<double> a;
    std::vector<double> s_next;
    std::vector<double> r;
    std::vector<double> d;
};

/// Fixed-capacity ring buffer; once full, the oldest record is overwritten.
class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity = 102400);

    void push(Transition t);
    int size() const { return static_cast<int>(store_.size()); }
    int capacity() const { return capacity_; }
    const Transition& operator[](int i) const { return store_[static_cast<size_t>(i)]; }

    /// Partition of [0, size) into shuffled batches of at most `batch_size`
    /// indices each; every record appears exactly once per epoch. A trailing
    /// short batch is kept.
    std::vector<std::vector<int>> epoch_batches(int batch_size, Rng& rng) const;

    /// Gather the indexed records into row matrices; x = [s_next | r].
    void gather(const std::vector<int>& idx, Array& s, Array& a, Array& d,
                Array& x) const;

private:
    int capacity_;
    int head_ = 0;  // next overwrite position once full
    std::vector<Transition> store_;
};

} // namespace lira::replay
