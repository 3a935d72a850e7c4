#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sig/error.hpp"

namespace sig {

enum class Color { gray, black, white, silver, blue, green, yellow, red, purple };
enum class VehicleKind { car, truck, van, bus };

inline constexpr std::array<std::string_view, 9> kColorNames = {
    "gray", "black", "white", "silver", "blue", "green", "yellow", "red", "purple"};
inline constexpr std::array<std::string_view, 4> kVehicleKindNames = {"car", "truck", "van", "bus"};

inline std::string_view to_string(Color c) { return kColorNames[static_cast<size_t>(c)]; }
inline std::string_view to_string(VehicleKind k) { return kVehicleKindNames[static_cast<size_t>(k)]; }

inline std::optional<Color> parse_color(std::string_view s) {
    for (size_t i = 0; i < kColorNames.size(); ++i)
        if (s == kColorNames[i]) return static_cast<Color>(i);
    return std::nullopt;
}

inline std::optional<VehicleKind> parse_vehicle_kind(std::string_view s) {
    for (size_t i = 0; i < kVehicleKindNames.size(); ++i)
        if (s == kVehicleKindNames[i]) return static_cast<VehicleKind>(i);
    return std::nullopt;
}

/// Attribute schema of an object category. Full-schema objects carry
/// color + kind + order ("black truck 1"); order-only objects carry a
/// label plus rank ("sign 1").
enum class AttributeSchema { full, order_only };

struct CategoryDef {
    std::string name;      // registry name, e.g. "vehicles"
    std::string json_key;  // top-level key in the SIG file
    std::string label;     // object label for order-only categories, e.g. "sign"
    AttributeSchema schema = AttributeSchema::order_only;
    bool in_metrics = true;

    friend bool operator==(const CategoryDef&, const CategoryDef&) = default;
};

/// Category registry for one scene domain. The default registry matches
/// the driving ontology; other domains configure their own categories
/// while keeping the same file layout (categories + lanes + self).
struct Ontology {
    std::vector<CategoryDef> categories;
    std::string lanes_key = "traffic_lanes";
    std::string lane_label = "lane";
    std::string self_key = "self";
    bool include_lanes = false;  // opt lanes into the metric set as point-set objects

    static Ontology standard() {
        Ontology o;
        o.categories = {
            {"vehicles", "vehicles", "", AttributeSchema::full, true},
            {"signs", "traffic_signs", "sign", AttributeSchema::order_only, true},
            {"lights", "traffic_lights", "light", AttributeSchema::order_only, true},
        };
        return o;
    }

    int category_index(std::string_view name) const {
        for (size_t i = 0; i < categories.size(); ++i)
            if (categories[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

}  // namespace sig
