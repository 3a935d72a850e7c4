#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sig/attention_grid.hpp"
#include "sig/error.hpp"
#include "sig/linalg.hpp"
#include "sig/matching.hpp"
#include "sig/scene.hpp"

namespace sig {

/// Camera and field-of-view parameters for the gaze attention radius.
struct CameraSpec {
    double focal_mm = 0.0;
    double image_w = 0.0, image_h = 0.0;    // pixels
    double sensor_w_mm = 0.0, sensor_h_mm = 0.0;
    double fov_w_deg = 0.0, fov_h_deg = 0.0;
};

/// Circular attention radius in pixels: per axis, the focal length in
/// pixel units times the tangent of half the field of view; the reported
/// radius is the smaller of the two.
inline double attention_radius(const CameraSpec& cam) {
    if (cam.focal_mm <= 0.0 || cam.image_w <= 0.0 || cam.image_h <= 0.0 ||
        cam.sensor_w_mm <= 0.0 || cam.sensor_h_mm <= 0.0 || cam.fov_w_deg < 0.0 ||
        cam.fov_h_deg < 0.0 || cam.fov_w_deg >= 180.0 || cam.fov_h_deg >= 180.0)
        fail(errc::invalid_spec, "camera spec fields must be positive with fov in [0, 180)");
    constexpr double deg = std::numbers::pi / 180.0;
    const double r_w = cam.focal_mm * cam.image_w / cam.sensor_w_mm * std::tan(cam.fov_w_deg / 2.0 * deg);
    const double r_h = cam.focal_mm * cam.image_h / cam.sensor_h_mm * std::tan(cam.fov_h_deg / 2.0 * deg);
    return std::min(r_w, r_h);
}

/// Dense image-space attention map, row-major with at(x, y) addressing.
struct AttentionMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    AttentionMap() = default;
    AttentionMap(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }

    /// Rescale to [0, 1]; a constant map collapses to all zeros.
    void min_max_normalize() {
        if (values.empty()) return;
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double min = *lo, range = *hi - *lo;
        if (range == 0.0) {
            std::fill(values.begin(), values.end(), 0.0);
            return;
        }
        for (double& v : values) v = (v - min) / range;
    }
};

struct GazeSample {
    long frame = 0;
    double x = 0.0;
    double y = 0.0;
};

enum class StampKernel { disk, gaussian };

/// Accumulate gaze samples into an image-space attention map: one kernel
/// stamp of the given radius per sample, summed over all frames, then
/// min-max normalized. Samples outside the image are dropped; the count
/// of stamped samples is reported through used_samples when provided.
inline AttentionMap accumulate_gaze(std::span<const GazeSample> samples, double radius, int width,
                                    int height, StampKernel kernel = StampKernel::disk,
                                    int* used_samples = nullptr) {
    if (width <= 0 || height <= 0) fail(errc::invalid_spec, "attention map size must be positive");
    if (radius <= 0.0) fail(errc::invalid_spec, "attention radius must be positive");

    AttentionMap map(width, height);
    const double sigma = radius / 2.0;
    int used = 0;
    for (const GazeSample& s : samples) {
        if (s.x < 0.0 || s.y < 0.0 || s.x >= width || s.y >= height) continue;
        ++used;
        const int x0 = std::max(0, static_cast<int>(std::floor(s.x - radius)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(s.x + radius)));
        const int y0 = std::max(0, static_cast<int>(std::floor(s.y - radius)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(s.y + radius)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - s.x, dy = y - s.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 > radius * radius) continue;
                map.at(x, y) += kernel == StampKernel::disk
                                    ? 1.0
                                    : std::exp(-d2 / (2.0 * sigma * sigma));
            }
        }
    }
    if (used_samples) *used_samples = used;
    map.min_max_normalize();
    return map;
}

/// One image-to-grid point correspondence for homography estimation.
struct Correspondence {
    double u = 0.0, v = 0.0;    // image pixel
    double gx = 0.0, gy = 0.0;  // grid cell
};

/// Plane projective map from image pixels to grid coordinates, stored in
/// canonical scale: the largest-magnitude entry is fixed to one, so any
/// two matrices equal up to scale compare (and project) identically.
class Homography {
public:
    static Homography from_matrix(const Mat3& m) {
        Homography h;
        h.mat_ = m;
        size_t largest = 0;
        for (size_t i = 1; i < 9; ++i)
            if (std::abs(h.mat_.m[i]) > std::abs(h.mat_.m[largest])) largest = i;
        const double scale = h.mat_.m[largest];
        if (scale == 0.0 || !std::isfinite(scale))
            fail(errc::singular_homography, "homography matrix is zero or non-finite");
        for (double& v : h.mat_.m) v /= scale;
        if (std::abs(h.mat_.determinant()) < 1e-12)
            fail(errc::singular_homography, "homography matrix is singular");
        return h;
    }

    const Mat3& matrix() const { return mat_; }
    double determinant() const { return mat_.determinant(); }
    Mat3 inverse() const { return mat_.inverse(); }

    GridPos apply(double u, double v) const {
        const auto p = mat_.apply(u, v);
        return {p[0] / p[2], p[1] / p[2]};
    }

private:
    Mat3 mat_ = Mat3::identity();
};

/// Estimate the image-to-grid homography from point correspondences with
/// the direct linear transform: two equations per point stacked into a
/// 2Nx9 system whose least-squares null vector (smallest eigenvector of
/// AtA) is the flattened matrix. Points are Hartley-normalized first.
inline Homography estimate_homography(std::span<const Correspondence> points) {
    if (points.size() < 4) fail(errc::too_few_points, "homography needs at least 4 correspondences");

    struct Norm {
        Mat3 t;      // raw -> normalized
        Mat3 t_inv;  // normalized -> raw
    };
    auto normalizer = [&](bool image_side) -> Norm {
        double cx = 0.0, cy = 0.0;
        for (const auto& p : points) {
            cx += image_side ? p.u : p.gx;
            cy += image_side ? p.v : p.gy;
        }
        const double n = static_cast<double>(points.size());
        cx /= n;
        cy /= n;
        double mean_dist = 0.0;
        for (const auto& p : points) {
            const double dx = (image_side ? p.u : p.gx) - cx;
            const double dy = (image_side ? p.v : p.gy) - cy;
            mean_dist += std::sqrt(dx * dx + dy * dy);
        }
        mean_dist /= n;
        const double s = mean_dist > 0.0 ? std::numbers::sqrt2 / mean_dist : 1.0;
        Norm out;
        out.t = {{s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1}};
        out.t_inv = {{1.0 / s, 0, cx, 0, 1.0 / s, cy, 0, 0, 1}};
        return out;
    };

    const Norm img = normalizer(true);
    const Norm grid = normalizer(false);

    std::vector<double> ata(81, 0.0);
    auto add_row = [&](const std::array<double, 9>& row) {
        for (int i = 0; i < 9; ++i)
            for (int j = i; j < 9; ++j) ata[static_cast<size_t>(i) * 9 + j] += row[i] * row[j];
    };
    for (const auto& p : points) {
        const auto pi = img.t.apply(p.u, p.v);
        const auto wi = grid.t.apply(p.gx, p.gy);
        const double u = pi[0], v = pi[1];
        const double X = wi[0], Y = wi[1];
        add_row({u, v, 1, 0, 0, 0, -X * u, -X * v, -X});
        add_row({0, 0, 0, u, v, 1, -Y * u, -Y * v, -Y});
    }
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < i; ++j) ata[static_cast<size_t>(i) * 9 + j] = ata[static_cast<size_t>(j) * 9 + i];

    const auto eigen = detail::jacobi_eigen(ata, 9);
    int smallest = 0, second = -1;
    double largest_val = eigen.values[0];
    for (int k = 1; k < 9; ++k) {
        largest_val = std::max(largest_val, eigen.values[k]);
        if (eigen.values[k] < eigen.values[smallest]) smallest = k;
    }
    for (int k = 0; k < 9; ++k) {
        if (k == smallest) continue;
        if (second < 0 || eigen.values[k] < eigen.values[second]) second = k;
    }
    // A second near-null direction means the correspondences do not pin a
    // unique plane map (e.g. collinear points).
    if (largest_val <= 0.0 || eigen.values[second] <= 1e-10 * largest_val)
        fail(errc::degenerate_configuration, "correspondences do not determine a unique homography");

    Mat3 hn;
    for (int i = 0; i < 9; ++i) hn.m[static_cast<size_t>(i)] = eigen.vectors[static_cast<size_t>(i) * 9 + smallest];
    if (std::abs(hn.determinant()) < 1e-14)
        fail(errc::degenerate_configuration, "recovered matrix is rank deficient");
    return Homography::from_matrix(grid.t_inv * hn * img.t);
}

/// Default correspondence set used when no calibration is supplied:
/// image corners onto grid corners, with the top of the image mapping to
/// the far row. A stand-in for tests and demos, not a physical camera
/// model.
inline std::vector<Correspondence> default_corner_correspondences(double width, double height) {
    return {
        {0.0, 0.0, 0.0, 9.0},
        {width, 0.0, 9.0, 9.0},
        {width, height, 9.0, 0.0},
        {0.0, height, 0.0, 0.0},
    };
}

/// Project an image attention map onto the grid: each cell back-projects
/// through the inverse homography, samples the floored source pixel (zero
/// outside the image), and the hundred samples are min-max normalized.
inline AttentionGrid project_attention(const AttentionMap& img, const Homography& h) {
    const Mat3 inv = h.inverse();
    AttentionGrid grid;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int gy = 0; gy < kGridSize; ++gy) {
        for (int gx = 0; gx < kGridSize; ++gx) {
            const auto p = inv.apply(static_cast<double>(gx), static_cast<double>(gy));
            double sample = 0.0;
            if (p[2] != 0.0) {
                const double x = p[0] / p[2];
                const double y = p[1] / p[2];
                const int px = static_cast<int>(std::floor(x));
                const int py = static_cast<int>(std::floor(y));
                if (px >= 0 && px < img.width && py >= 0 && py < img.height) sample = img.at(px, py);
            }
            grid.at(gx, gy) = sample;
            lo = std::min(lo, sample);
            hi = std::max(hi, sample);
        }
    }
    const double range = hi - lo;
    if (range == 0.0) {
        grid.values.fill(0.0);
    } else {
        for (double& v : grid.values) v = (v - lo) / range;
    }
    return grid;
}

/// Attention weight per canonical object (ego last), read from the grid
/// at each object's cell.
inline std::vector<double> object_attention(const AttentionGrid& grid, const SigScene& scene,
                                            const Ontology& ont = Ontology::standard()) {
    const auto objects = object_refs(scene, ont);
    std::vector<double> out;
    out.reserve(objects.size());
    for (const ObjectRef& o : objects) out.push_back(attention_at(grid, o.pos));
    return out;
}

struct GazeMetrics {
    double pcc = 0.0;
    double kl_divergence = 0.0;
    double information_gain = 0.0;
};

/// Saliency agreement between a predicted and ground-truth map: Pearson
/// correlation of the raw values, KL divergence of the ground truth
/// against the prediction after epsilon smoothing and sum normalization,
/// and information gain of the prediction over a baseline (uniform when
/// none is given), in bits, weighted by ground-truth mass.
inline GazeMetrics gaze_metrics(const AttentionMap& pred, const AttentionMap& gt,
                                const AttentionMap* baseline = nullptr, double eps = 1e-7) {
    if (pred.width != gt.width || pred.height != gt.height)
        fail(errc::size_mismatch, "prediction and GT maps differ in size");
    if (baseline && (baseline->width != gt.width || baseline->height != gt.height))
        fail(errc::size_mismatch, "baseline map differs in size");
    const size_t n = gt.values.size();
    bool gt_nonzero = false;
    for (double v : gt.values) gt_nonzero = gt_nonzero || v != 0.0;
    if (!gt_nonzero) fail(errc::zero_gt, "GT map is identically zero");

    GazeMetrics out;

    // Pearson correlation; zero variance on either side resolves to 0.
    double mean_p = 0.0, mean_g = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_p += pred.values[i];
        mean_g += gt.values[i];
    }
    mean_p /= static_cast<double>(n);
    mean_g /= static_cast<double>(n);
    double cov = 0.0, var_p = 0.0, var_g = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dp = pred.values[i] - mean_p;
        const double dg = gt.values[i] - mean_g;
        cov += dp * dg;
        var_p += dp * dp;
        var_g += dg * dg;
    }
    out.pcc = (var_p > 0.0 && var_g > 0.0) ? cov / std::sqrt(var_p * var_g) : 0.0;

    auto smoothed = [&](const AttentionMap& map) {
        std::vector<double> dist(map.values.size());
        double sum = 0.0;
        for (size_t i = 0; i < dist.size(); ++i) {
            dist[i] = map.values[i] + eps;
            sum += dist[i];
        }
        for (double& v : dist) v /= sum;
        return dist;
    };
    const std::vector<double> p_gt = smoothed(gt);
    const std::vector<double> q_pred = smoothed(pred);
    std::vector<double> b;
    if (baseline) {
        b = smoothed(*baseline);
    } else {
        b.assign(n, 1.0 / static_cast<double>(n));
    }

    double kl = 0.0, ig = 0.0;
    for (size_t i = 0; i < n; ++i) {
        kl += p_gt[i] * std::log(p_gt[i] / q_pred[i]);
        ig += p_gt[i] * (std::log2(q_pred[i]) - std::log2(b[i]));
    }
    out.kl_divergence = kl;
    out.information_gain = ig;
    return out;
}

}  // namespace sig
