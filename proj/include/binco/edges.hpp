#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace binco {

// Unordered variable pair, stored with i < j (0-based).
struct Edge {
    int i = 0;
    int j = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::size_t candidate_edge_count(int p) {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
}

// Row-major position of (i, j), i < j, in the strict upper triangle.
inline std::size_t pair_index(int i, int j, int p) {
    const auto ii = static_cast<std::size_t>(i);
    return ii * static_cast<std::size_t>(p) - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

Edge pair_from_index(std::size_t index, int p);

// Sorted, duplicate-free set of edges over p variables.
class EdgeSet {
public:
    EdgeSet() = default;
    explicit EdgeSet(int p) : p_(p) {}
    // Normalizes orientation, sorts and removes duplicates. Throws
    // IndexOutOfRange on self-loops or indices outside [0, p).
    EdgeSet(int p, std::vector<Edge> edges);

    int dimension() const noexcept { return p_; }
    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty(); }
    bool contains(Edge e) const;
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    auto begin() const noexcept { return edges_.begin(); }
    auto end() const noexcept { return edges_.end(); }

    bool is_subset_of(const EdgeSet& other) const;

    friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

private:
    int p_ = 0;
    std::vector<Edge> edges_;
};

}  // namespace binco
