#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

namespace sig {

/// Position on the 10x10 bird's-eye grid. Columns grow to the right,
/// rows grow away from the ego vehicle (row 0 is the ego row).
/// Stored as reals: ego alignment may shift positions off the integer
/// lattice and outside [0, 9]; nothing downstream clamps them.
struct GridPos {
    double x = 0.0;
    double y = 0.0;

    friend constexpr GridPos operator+(GridPos a, GridPos b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr GridPos operator-(GridPos a, GridPos b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr bool operator==(const GridPos&, const GridPos&) = default;
};

inline double grid_distance(GridPos a, GridPos b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline constexpr int kDirectionBins = 8;

inline constexpr std::array<std::string_view, kDirectionBins> kDirectionalLabels = {
    "at the back of",       "at the back left of",  "at the left of",  "at the front left of",
    "at the front of",      "at the front right of", "at the right of", "at the back right of",
};

/// Quantize an angle expressed in sector units into a direction bin.
/// One unit is 45 degrees measured clockwise starting from the "back"
/// heading (-y). Exact sector boundaries (t = k + 0.5) resolve to the
/// smaller of the two adjacent bin indices.
inline int sector_bin_from_units(double t) {
    double tm = std::fmod(t, 8.0);
    if (tm < 0.0) tm += 8.0;
    const double shifted = tm + 0.5;
    const double fl = std::floor(shifted);
    int bin = static_cast<int>(fl) % kDirectionBins;
    if (shifted == fl) {
        const int neighbor = (bin + kDirectionBins - 1) % kDirectionBins;
        bin = bin < neighbor ? bin : neighbor;
    }
    return bin;
}

/// Direction bin of a displacement on the grid, +x right and +y front.
/// Bin k labels the displacement with kDirectionalLabels[k]; bin(A - B)
/// reads "A is <label> B". The zero displacement has no direction and
/// maps to bin 0 by convention; callers track degeneracy themselves.
inline int direction_bin(double dx, double dy) {
    if (dx == 0.0 && dy == 0.0) return 0;
    const double theta = std::atan2(dy, dx);
    constexpr double half_pi = std::numbers::pi / 2.0;
    constexpr double quarter_pi = std::numbers::pi / 4.0;
    return sector_bin_from_units((-half_pi - theta) / quarter_pi);
}

inline int direction_bin(GridPos from, GridPos to) {
    // Edge convention: the bin of edge (i, j) quantizes pos_i - pos_j.
    return direction_bin(from.x - to.x, from.y - to.y);
}

inline int antipodal_bin(int bin) { return (bin + 4) % kDirectionBins; }

}  // namespace sig
