#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "sig/geometry.hpp"

namespace sig {

inline constexpr int kGridSize = 10;

/// 10x10 attention weights over the grid, normalized to [0, 1]. Cell
/// (x, y) follows the grid convention of GridPos.
struct AttentionGrid {
    std::array<double, kGridSize * kGridSize> values{};

    double at(int x, int y) const { return values[static_cast<size_t>(y) * kGridSize + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * kGridSize + x]; }

    static AttentionGrid constant(double v) {
        AttentionGrid g;
        g.values.fill(v);
        return g;
    }
};

/// Attention weight of an object: the grid value at its nearest cell.
/// Positions pushed off the grid by ego alignment clamp to the border
/// for the lookup only; the positions themselves stay untouched.
inline double attention_at(const AttentionGrid& grid, GridPos pos) {
    const int x = std::clamp(static_cast<int>(std::lround(pos.x)), 0, kGridSize - 1);
    const int y = std::clamp(static_cast<int>(std::lround(pos.y)), 0, kGridSize - 1);
    return grid.at(x, y);
}

}  // namespace sig
