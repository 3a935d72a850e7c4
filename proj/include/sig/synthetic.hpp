#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "sig/ontology.hpp"
#include "sig/scene.hpp"

namespace sig {

namespace detail {

inline SigScene random_scene_with_counts(std::mt19937_64& rng, int vehicles, int signs,
                                         int lights) {
    std::uniform_int_distribution<int> cell(0, 9);
    std::uniform_int_distribution<int> color(0, 8);
    std::uniform_int_distribution<int> kind(0, 3);

    SigScene scene;
    scene.categories.resize(3);
    for (int i = 0; i < vehicles; ++i) {
        SceneObject obj;
        obj.attrs.order = i + 1;
        obj.attrs.color = static_cast<Color>(color(rng));
        obj.attrs.kind = static_cast<VehicleKind>(kind(rng));
        obj.pos = {static_cast<double>(cell(rng)), static_cast<double>(cell(rng))};
        scene.categories[0].push_back(obj);
    }
    for (int i = 0; i < signs; ++i) {
        SceneObject obj;
        obj.attrs.order = i + 1;
        obj.pos = {static_cast<double>(cell(rng)), static_cast<double>(cell(rng))};
        scene.categories[1].push_back(obj);
    }
    for (int i = 0; i < lights; ++i) {
        SceneObject obj;
        obj.attrs.order = i + 1;
        obj.pos = {static_cast<double>(cell(rng)), static_cast<double>(cell(rng))};
        scene.categories[2].push_back(obj);
    }
    scene.ego = {static_cast<double>(cell(rng)), 0.0};
    return scene;
}

}  // namespace detail

/// Random scene over the standard ontology with the requested number of
/// non-ego objects, split roughly 60/20/20 between vehicles, signs and
/// lights. Positions are integer cells, so generated scenes serialize to
/// valid SIG documents.
inline SigScene random_scene(std::mt19937_64& rng, int object_count) {
    std::uniform_int_distribution<int> split(0, 9);
    int vehicles = 0, signs = 0, lights = 0;
    for (int i = 0; i < object_count; ++i) {
        const int r = split(rng);
        if (r < 6)
            ++vehicles;
        else if (r < 8)
            ++signs;
        else
            ++lights;
    }
    return detail::random_scene_with_counts(rng, vehicles, signs, lights);
}

/// Random scene whose objects are all vehicles. The single-category case
/// is the worst case for the per-category assignment, so the bench uses
/// it to expose the matching's full growth.
inline SigScene random_vehicle_scene(std::mt19937_64& rng, int object_count) {
    return detail::random_scene_with_counts(rng, object_count, 0, 0);
}

/// Noisy copy of a scene imitating an imperfect prediction: jitters some
/// positions, occasionally flips a vehicle color and drops an occasional
/// object (re-ranking order-only categories to stay contiguous).
inline SigScene perturb_scene(std::mt19937_64& rng, const SigScene& scene) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> jitter(-2, 2);
    std::uniform_int_distribution<int> color(0, 8);

    SigScene out = scene;
    for (size_t ci = 0; ci < out.categories.size(); ++ci) {
        auto& objects = out.categories[ci];
        for (size_t oi = 0; oi < objects.size();) {
            if (coin(rng) < 0.1) {
                objects.erase(objects.begin() + static_cast<long>(oi));
                continue;
            }
            if (coin(rng) < 0.5) {
                objects[oi].pos.x = std::clamp(objects[oi].pos.x + jitter(rng), 0.0, 9.0);
                objects[oi].pos.y = std::clamp(objects[oi].pos.y + jitter(rng), 0.0, 9.0);
            }
            if (objects[oi].attrs.color && coin(rng) < 0.15)
                objects[oi].attrs.color = static_cast<Color>(color(rng));
            ++oi;
        }
        if (ci > 0)  // order-only categories keep contiguous ranks
            for (size_t oi = 0; oi < objects.size(); ++oi)
                objects[oi].attrs.order = static_cast<int>(oi) + 1;
    }
    if (coin(rng) < 0.3) out.ego.x = std::clamp(out.ego.x + jitter(rng), 0.0, 9.0);
    return out;
}

}  // namespace sig
