#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <queue>
#include <vector>

#include "fission/metric_space.hpp"

namespace fission {

/// Static k-d tree over a dataset for exact k-nearest-neighbour queries under
/// any built-in metric. |q[axis] - split| never exceeds an Lp distance for any
/// p > 0, so pruning on the splitting plane is exact.
class NeighborIndex {
public:
    explicit NeighborIndex(const Dataset& ds, Metric metric, std::size_t leaf_size = 16)
        : ds_(ds), metric_(metric), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
        perm_.resize(ds.size());
        std::iota(perm_.begin(), perm_.end(), Index{0});
        nodes_.reserve(2 * ds.size() / leaf_size_ + 1);
        build(0, perm_.size());
    }

    /// Distances from point `self` to its `count` nearest other points, ascending.
    /// Distances are computed exactly as distance_matrix() computes them.
    std::vector<double> nearest_distances(Index self, std::size_t count) const {
        std::priority_queue<double> heap; // max-heap of the best `count` so far
        if (count > 0) search(0, self, count, heap);
        std::vector<double> out(heap.size());
        for (std::size_t i = out.size(); i-- > 0;) {
            out[i] = heap.top();
            heap.pop();
        }
        return out;
    }

private:
    struct Node {
        std::size_t begin = 0, end = 0;
        std::size_t axis = 0;
        double split = 0.0;
        std::size_t left = 0, right = 0; // child node ids; 0 means leaf
    };

    std::size_t build(std::size_t begin, std::size_t end) {
        const std::size_t id = nodes_.size();
        nodes_.push_back({begin, end});
        if (end - begin <= leaf_size_) return id;
        // Split on the axis of widest spread at the median.
        std::size_t axis = 0;
        double widest = -1.0;
        for (std::size_t a = 0; a < ds_.dims(); ++a) {
            double lo = ds_.point(perm_[begin])[a], hi = lo;
            for (std::size_t i = begin + 1; i < end; ++i) {
                const double v = ds_.point(perm_[i])[a];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > widest) {
                widest = hi - lo;
                axis = a;
            }
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin),
                         perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                         perm_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](Index a, Index b) { return ds_.point(a)[axis] < ds_.point(b)[axis]; });
        nodes_[id].axis = axis;
        nodes_[id].split = ds_.point(perm_[mid])[axis];
        const std::size_t left = build(begin, mid);
        const std::size_t right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void search(std::size_t id, Index self, std::size_t count, std::priority_queue<double>& heap) const {
        const Node& node = nodes_[id];
        const auto q = ds_.point(self);
        if (node.left == 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const Index j = perm_[i];
                if (j == self) continue;
                const double d = detail::distance_unchecked(q, ds_.point(j), metric_);
                if (heap.size() < count) {
                    heap.push(d);
                } else if (d < heap.top()) {
                    heap.pop();
                    heap.push(d);
                }
            }
            return;
        }
        const double diff = q[node.axis] - node.split;
        const std::size_t near = diff < 0.0 ? node.left : node.right;
        const std::size_t far = diff < 0.0 ? node.right : node.left;
        search(near, self, count, heap);
        if (heap.size() < count || std::abs(diff) <= heap.top()) search(far, self, count, heap);
    }

    const Dataset& ds_;
    Metric metric_;
    std::size_t leaf_size_;
    std::vector<Index> perm_;
    std::vector<Node> nodes_;
};

} // namespace fission
