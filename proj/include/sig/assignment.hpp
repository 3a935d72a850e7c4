#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sig/error.hpp"

namespace sig {

/// Multiplicative tolerance factors applied to a pair's distance when the
/// corresponding attribute matches; a mismatched attribute contributes a
/// factor of one. Values live in (0, 1].
struct MatchWeights {
    double color = 0.5;
    double order = 0.5;
    double kind = 0.5;
};

struct MatchedPair {
    int gt = -1;
    int pred = -1;
    double cost = 0.0;
};

/// Minimum-cost maximal matching of one cost matrix. Rows are ground-truth
/// objects, columns predicted objects; surplus rows/columns end up in the
/// unmatched lists. Pairs are sorted by ground-truth index.
struct Matching {
    std::vector<MatchedPair> pairs;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_pred;

    double total_cost() const {
        double total = 0.0;
        for (const auto& p : pairs) total += p.cost;
        return total;
    }
};

class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& at(int r, int c) { return values_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return values_[static_cast<size_t>(r) * cols_ + c]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> values_;
};

namespace detail {

/// Scratch buffers reused across solve_assignment calls. One instance per
/// thread keeps the solver allocation-free on the hot path while staying
/// safe for concurrent per-frame evaluation.
struct AssignmentWorkspace {
    std::vector<double> padded;
    std::vector<double> u, v, minv;
    std::vector<int> col_to_row, way;
    std::vector<char> used;
    std::vector<int> adj;        // flat zero-reduced-cost adjacency
    std::vector<int> adj_start;  // row offsets into adj, n+1 entries
    std::vector<int> chosen, col_owner;
    std::vector<char> col_taken, visited;
};

inline AssignmentWorkspace& assignment_workspace() {
    thread_local AssignmentWorkspace ws;
    return ws;
}

/// Shortest-augmenting-path assignment on the padded square matrix in
/// ws.padded. Fills ws.col_to_row and the dual potentials ws.u / ws.v,
/// which satisfy cost[r][c] - u[r+1] - v[c+1] >= 0 up to rounding.
inline void solve_square(AssignmentWorkspace& ws, int n) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    ws.u.assign(static_cast<size_t>(n) + 1, 0.0);
    ws.v.assign(static_cast<size_t>(n) + 1, 0.0);
    ws.col_to_row.assign(static_cast<size_t>(n) + 1, 0);  // 1-based rows; 0 = free
    ws.way.assign(static_cast<size_t>(n) + 1, 0);
    ws.minv.resize(static_cast<size_t>(n) + 1);
    ws.used.resize(static_cast<size_t>(n) + 1);

    for (int r = 1; r <= n; ++r) {
        ws.col_to_row[0] = r;
        int j0 = 0;
        std::fill(ws.minv.begin(), ws.minv.end(), kInf);
        std::fill(ws.used.begin(), ws.used.end(), 0);
        do {
            ws.used[j0] = 1;
            const int r0 = ws.col_to_row[j0];
            double delta = kInf;
            int j1 = -1;
            const double* row = ws.padded.data() + static_cast<size_t>(r0 - 1) * n;
            for (int j = 1; j <= n; ++j) {
                if (ws.used[j]) continue;
                const double cur = row[j - 1] - ws.u[r0] - ws.v[j];
                if (cur < ws.minv[j]) {
                    ws.minv[j] = cur;
                    ws.way[j] = j0;
                }
                if (ws.minv[j] < delta) {
                    delta = ws.minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (ws.used[j]) {
                    ws.u[ws.col_to_row[j]] += delta;
                    ws.v[j] -= delta;
                } else {
                    ws.minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (ws.col_to_row[j0] != 0);
        do {
            const int j1 = ws.way[j0];
            ws.col_to_row[j0] = ws.col_to_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }
}

/// Kuhn augmenting-path probe over the flat adjacency: true when every
/// row in [first_row, n) can be matched into columns not marked taken.
inline bool remaining_rows_matchable(AssignmentWorkspace& ws, int first_row, int n) {
    std::fill(ws.col_owner.begin(), ws.col_owner.end(), -1);

    struct Aug {
        AssignmentWorkspace& ws;
        bool operator()(int row) {
            for (int k = ws.adj_start[row]; k < ws.adj_start[row + 1]; ++k) {
                const int c = ws.adj[k];
                if (ws.col_taken[c] || ws.visited[c]) continue;
                ws.visited[c] = 1;
                if (ws.col_owner[c] < 0 || (*this)(ws.col_owner[c])) {
                    ws.col_owner[c] = row;
                    return true;
                }
            }
            return false;
        }
    };

    Aug aug{ws};
    for (int r = first_row; r < n; ++r) {
        std::fill(ws.visited.begin(), ws.visited.end(), 0);
        if (!aug(r)) return false;
    }
    return true;
}

}  // namespace detail

/// Minimum-cost maximal matching of a rectangular nonnegative matrix.
/// The matrix is padded square with a sentinel larger than every entry,
/// solved in O(n^3), and the result is then canonicalized: among all
/// minimum-cost matchings the lexicographically smallest pairing by
/// (gt index, pred index) is returned. Throws NonFiniteCost on NaN/inf.
inline Matching solve_assignment(const CostMatrix& cost) {
    const int rows = cost.rows();
    const int cols = cost.cols();
    Matching result;
    if (rows == 0 || cols == 0) {
        for (int r = 0; r < rows; ++r) result.unmatched_gt.push_back(r);
        for (int c = 0; c < cols; ++c) result.unmatched_pred.push_back(c);
        return result;
    }

    double max_abs = 0.0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double v = cost.at(r, c);
            if (!std::isfinite(v)) fail(errc::non_finite_cost, "cost matrix entry is not finite");
            max_abs = std::max(max_abs, std::abs(v));
        }

    const int n = std::max(rows, cols);
    const double sentinel = max_abs + 1.0;
    detail::AssignmentWorkspace& ws = detail::assignment_workspace();
    ws.padded.assign(static_cast<size_t>(n) * n, sentinel);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) ws.padded[static_cast<size_t>(r) * n + c] = cost.at(r, c);

    detail::solve_square(ws, n);

    // Complementary slackness: every minimum-cost matching lives inside the
    // zero-reduced-cost subgraph of the optimal potentials. Enumerate that
    // subgraph and extract its lexicographically smallest perfect matching.
    const double tol = 1e-12 * (1.0 + sentinel);
    ws.adj.clear();
    ws.adj_start.assign(static_cast<size_t>(n) + 1, 0);
    for (int r = 0; r < n; ++r) {
        ws.adj_start[r] = static_cast<int>(ws.adj.size());
        const double* row = ws.padded.data() + static_cast<size_t>(r) * n;
        for (int c = 0; c < n; ++c)
            if (row[c] - ws.u[r + 1] - ws.v[c + 1] <= tol) ws.adj.push_back(c);
    }
    ws.adj_start[n] = static_cast<int>(ws.adj.size());

    ws.chosen.assign(static_cast<size_t>(n), -1);
    ws.col_taken.assign(static_cast<size_t>(n), 0);
    ws.col_owner.resize(static_cast<size_t>(n));
    ws.visited.resize(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) {
        bool fixed = false;
        for (int k = ws.adj_start[r]; k < ws.adj_start[r + 1]; ++k) {
            const int c = ws.adj[k];
            if (ws.col_taken[c]) continue;
            ws.col_taken[c] = 1;
            if (detail::remaining_rows_matchable(ws, r + 1, n)) {
                ws.chosen[r] = c;
                fixed = true;
                break;
            }
            ws.col_taken[c] = 0;
        }
        if (!fixed) throw std::logic_error("assignment refinement lost feasibility");
    }

    for (int r = 0; r < rows; ++r) {
        const int c = ws.chosen[r];
        if (c < cols)
            result.pairs.push_back({r, c, cost.at(r, c)});
        else
            result.unmatched_gt.push_back(r);
    }
    for (int c = 0; c < cols; ++c) {
        bool taken = false;
        for (int r = 0; r < rows; ++r) taken = taken || ws.chosen[r] == c;
        if (!taken) result.unmatched_pred.push_back(c);
    }
    return result;
}

/// Exhaustive-enumeration reference for solve_assignment. Enumerates every
/// maximal injection between the two sides; requires min(rows, cols) <= 8.
inline Matching oracle_assignment(const CostMatrix& cost) {
    const int rows = cost.rows();
    const int cols = cost.cols();
    if (std::min(rows, cols) > 8) fail(errc::too_large, "oracle handles min(rows, cols) <= 8");

    Matching result;
    if (rows == 0 || cols == 0) {
        for (int r = 0; r < rows; ++r) result.unmatched_gt.push_back(r);
        for (int c = 0; c < cols; ++c) result.unmatched_pred.push_back(c);
        return result;
    }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (!std::isfinite(cost.at(r, c)))
                fail(errc::non_finite_cost, "cost matrix entry is not finite");

    const bool rows_small = rows <= cols;
    const int small = rows_small ? rows : cols;
    const int large = rows_small ? cols : rows;

    std::vector<int> pick(small, -1);
    std::vector<char> used(large, 0);
    std::vector<std::pair<int, int>> best_pairs;
    double best_total = std::numeric_limits<double>::infinity();

    auto evaluate_leaf = [&]() {
        double total = 0.0;
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(small);
        for (int s = 0; s < small; ++s) {
            const int r = rows_small ? s : pick[s];
            const int c = rows_small ? pick[s] : s;
            pairs.emplace_back(r, c);
        }
        std::sort(pairs.begin(), pairs.end());
        for (const auto& [r, c] : pairs) total += cost.at(r, c);
        if (total < best_total || (total == best_total && pairs < best_pairs)) {
            best_total = total;
            best_pairs = std::move(pairs);
        }
    };

    auto recurse = [&](auto&& self, int depth) -> void {
        if (depth == small) {
            evaluate_leaf();
            return;
        }
        for (int t = 0; t < large; ++t) {
            if (used[t]) continue;
            used[t] = 1;
            pick[depth] = t;
            self(self, depth + 1);
            used[t] = 0;
        }
    };
    recurse(recurse, 0);

    std::vector<char> gt_used(rows, 0), pred_used(cols, 0);
    for (const auto& [r, c] : best_pairs) {
        result.pairs.push_back({r, c, cost.at(r, c)});
        gt_used[r] = 1;
        pred_used[c] = 1;
    }
    for (int r = 0; r < rows; ++r)
        if (!gt_used[r]) result.unmatched_gt.push_back(r);
    for (int c = 0; c < cols; ++c)
        if (!pred_used[c]) result.unmatched_pred.push_back(c);
    return result;
}

}  // namespace sig
