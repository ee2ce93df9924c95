#pragma once

#include "risaoi/noma.hpp"
#include "risaoi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace risaoi {

using Age = std::int64_t;

/// One-to-one pairing: weakOf[s] is the weak device clustered with strong s.
struct ClusterAssignment {
    std::vector<int> weakOf;

    bool is_permutation() const {
        std::vector<char> seen(weakOf.size(), 0);
        for (int w : weakOf) {
            if (w < 0 || w >= static_cast<int>(weakOf.size()) || seen[w]) return false;
            seen[w] = 1;
        }
        return true;
    }
    friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Square cost matrix, row-major, rows = strong devices, columns = weak.
template <typename T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), v_(n * n, fill) {}
    SquareMatrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()) {
        for (const auto& r : rows) {
            if (r.size() != n_) throw std::invalid_argument("SquareMatrix: ragged initializer");
            v_.insert(v_.end(), r.begin(), r.end());
        }
    }
    std::size_t size() const noexcept { return n_; }
    T& operator()(std::size_t r, std::size_t c) { return v_[r * n_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return v_[r * n_ + c]; }

private:
    std::size_t n_ = 0;
    std::vector<T> v_;
};

/// Minimum-cost perfect matching (Kuhn-Munkres with potentials, O(n^3)).
/// Rows and columns are scanned in index order, so ties resolve the same
/// way on every run.
template <typename T>
    requires std::is_arithmetic_v<T>
ClusterAssignment hungarian_solve(const SquareMatrix<T>& cost) {
    const int n = static_cast<int>(cost.size());
    ClusterAssignment out;
    out.weakOf.assign(n, -1);
    if (n == 0) return out;
    using Acc = std::conditional_t<std::is_integral_v<T>, std::int64_t, double>;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if constexpr (std::is_floating_point_v<T>)
                if (!std::isfinite(cost(i, j))) throw std::invalid_argument("hungarian_solve: non-finite cost");
    const Acc inf = std::numeric_limits<Acc>::max() / 4;

    // 1-based potentials; column 0 is a sentinel.
    std::vector<Acc> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            Acc delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const Acc cur = static_cast<Acc>(cost(i0 - 1, j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (int j = 1; j <= n; ++j) out.weakOf[p[j] - 1] = j - 1;
    return out;
}

template <typename T>
T assignment_cost(const SquareMatrix<T>& cost, const ClusterAssignment& a) {
    T total{};
    for (std::size_t s = 0; s < a.weakOf.size(); ++s) total += cost(s, static_cast<std::size_t>(a.weakOf[s]));
    return total;
}

/// Uniformly random pairing.
inline ClusterAssignment random_clustering(int clusters, Engine& eng) {
    ClusterAssignment a;
    a.weakOf.resize(clusters);
    std::iota(a.weakOf.begin(), a.weakOf.end(), 0);
    for (int i = clusters - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(a.weakOf[i], a.weakOf[pick(eng)]);
    }
    return a;
}

/// Age one slot ahead: 1 after a delivery, previous + 1 otherwise.
inline Age predicted_age(Age previous, bool success) { return success ? 1 : previous + 1; }

/// Predicted per-pair sum of ages, with the outcome grid cached alongside.
struct CostMatrix {
    SquareMatrix<Age> entries;
    SquareMatrix<PairOutcome> outcomes;
};

inline CostMatrix build_cost_matrix(const std::vector<Age>& strongAges, const std::vector<Age>& weakAges,
                                    const SquareMatrix<PairOutcome>& outcomes) {
    const std::size_t n = outcomes.size();
    if (strongAges.size() != n || weakAges.size() != n)
        throw std::invalid_argument("build_cost_matrix: age vectors must match the outcome grid");
    CostMatrix cm{SquareMatrix<Age>(n), outcomes};
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t w = 0; w < n; ++w) {
            const auto& o = outcomes(s, w);
            cm.entries(s, w) = predicted_age(strongAges[s], o.strongSuccess) + predicted_age(weakAges[w], o.weakSuccess);
        }
    return cm;
}

}  // namespace risaoi
