#include "lira/replay.hpp"

#include <cassert>
#include <numeric>

namespace lira::replay {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
    assert(capacity_ > 0);
    store_.reserve(static_cast<size_t>(capacity_));
}

void ReplayBuffer::push(Transition t) {
    if (size() < capacity_) {
        store_.push_back(std::move(t));
    } else {
        store_[static_cast<size_t>(head_)] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<std::vector<int>> ReplayBuffer::epoch_batches(int batch_size,
                                                          Rng& rng) const {
    assert(batch_size > 0);
    std::vector<int> order(static_cast<size_t>(size()));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::vector<int>> batches;
    for (size_t p = 0; p < order.size(); p += static_cast<size_t>(batch_size)) {
        const size_t q = std::min(order.size(), p + static_cast<size_t>(batch_size));
        batches.emplace_back(order.begin() + static_cast<long>(p),
                             order.begin() + static_cast<long>(q));
    }
    return batches;
}

void ReplayBuffer::gather(const std::vector<int>& idx, Array& s, Array& a,
                          Array& d, Array& x) const {
    assert(!idx.empty());
    const Transition& t0 = store_[static_cast<size_t>(idx[0])];
    const int n = static_cast<int>(idx.size());
    const int sd = static_cast<int>(t0.s.size());
    const int adim = static_cast<int>(t0.a.size());
    const int dd = static_cast<int>(t0.d.size());
    const int xd = static_cast<int>(t0.s_next.size() + t0.r.size());
    s = Array::mat(n, sd);
    a = Array::mat(n, adim);
    d = Array::mat(n, dd);
    x = Array::mat(n, xd);
    for (int i = 0; i < n; ++i) {
        const Transition& t = store_[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        for (int j = 0; j < sd; ++j) s.at(i, j) = t.s[static_cast<size_t>(j)];
        for (int j = 0; j < adim; ++j) a.at(i, j) = t.a[static_cast<size_t>(j)];
        for (int j = 0; j < dd; ++j) d.at(i, j) = t.d[static_cast<size_t>(j)];
        for (size_t j = 0; j < t.s_next.size(); ++j)
            x.at(i, static_cast<int>(j)) = t.s_next[j];
        for (size_t j = 0; j < t.r.size(); ++j)
            x.at(i, static_cast<int>(t.s_next.size() + j)) = t.r[j];
    }
}

} // namespace lira::replay
