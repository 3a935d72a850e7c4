#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sig/error.hpp"
#include "sig/geometry.hpp"
#include "sig/ontology.hpp"

namespace sig {

struct ObjectAttrs {
    int order = 0;
    std::optional<Color> color;
    std::optional<VehicleKind> kind;

    friend bool operator==(const ObjectAttrs&, const ObjectAttrs&) = default;
};

struct SceneObject {
    ObjectAttrs attrs;
    GridPos pos;

    friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Polyline {
    std::vector<GridPos> points;

    friend bool operator==(const Polyline&, const Polyline&) = default;

    GridPos centroid() const {
        GridPos c{};
        if (points.empty()) return c;
        for (const auto& p : points) c = c + p;
        return {c.x / static_cast<double>(points.size()), c.y / static_cast<double>(points.size())};
    }
};

/// One frame's grid world. Category object lists run parallel to the
/// ontology registry and are sorted by order. Instances are immutable by
/// convention once parsed; every metric takes them by const reference.
struct SigScene {
    std::vector<std::vector<SceneObject>> categories;
    std::vector<Polyline> lanes;
    GridPos ego;

    friend bool operator==(const SigScene&, const SigScene&) = default;

    const std::vector<SceneObject>& category(size_t i) const { return categories[i]; }

    size_t object_count() const {
        size_t n = 0;
        for (const auto& c : categories) n += c.size();
        return n;
    }
};

namespace detail {

inline std::string canonical_key(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : raw) {
        const unsigned char u = static_cast<unsigned char>(ch);
        if (std::isspace(u)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

inline std::optional<int> parse_positive_int(std::string_view s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    long value = 0;
    for (char ch : s) {
        if (ch < '0' || ch > '9') return std::nullopt;
        value = value * 10 + (ch - '0');
    }
    if (value < 1) return std::nullopt;
    return static_cast<int>(value);
}

inline double coordinate_value(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail(errc::non_integer, where + ": coordinates must be integers");
    const double d = v.get<double>();
    if (d < 0.0 || d > 9.0)
        fail(errc::out_of_range_coordinate, where + ": coordinate outside [0, 9]");
    return d;
}

inline GridPos parse_position(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2)
        fail(errc::malformed_json, where + ": position must be a 2-element array");
    return {coordinate_value(v[0], where), coordinate_value(v[1], where)};
}

inline nlohmann::ordered_json coordinate_json(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
        return static_cast<long long>(v);
    return v;
}

}  // namespace detail

/// Parse one SIG JSON document against an ontology. Enforces the file
/// format: closed attribute vocabularies, integer grid coordinates in
/// [0, 9], unique vehicle orders, contiguous sign/light/lane ranks, and
/// a mandatory "self" entry on row 0.
inline SigScene parse_sig(const std::string& text, const Ontology& ont = Ontology::standard()) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(errc::malformed_json, "input is not valid JSON");
    if (!doc.is_object()) fail(errc::malformed_json, "top level must be a JSON object");

    SigScene scene;
    scene.categories.resize(ont.categories.size());

    for (const auto& item : doc.items()) {
        const std::string& key = item.key();
        bool known = key == ont.lanes_key || key == ont.self_key;
        for (const auto& cat : ont.categories) known = known || key == cat.json_key;
        if (!known) fail(errc::malformed_json, "unknown top-level key '" + key + "'");
    }

    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        const CategoryDef& cat = ont.categories[ci];
        if (!doc.contains(cat.json_key)) continue;
        const nlohmann::json& section = doc[cat.json_key];
        if (!section.is_object())
            fail(errc::malformed_json, "'" + cat.json_key + "' must be a JSON object");

        auto& objects = scene.categories[ci];
        for (const auto& [raw_key, value] : section.items()) {
            const std::string key = detail::canonical_key(raw_key);
            SceneObject obj;
            if (cat.schema == AttributeSchema::full) {
                const size_t first = key.find(' ');
                const size_t second = first == std::string::npos ? std::string::npos
                                                                 : key.find(' ', first + 1);
                if (first == std::string::npos || second == std::string::npos ||
                    key.find(' ', second + 1) != std::string::npos)
                    fail(errc::malformed_json,
                         "'" + raw_key + "': expected \"color kind order\"");
                const std::string color_tok = key.substr(0, first);
                const std::string kind_tok = key.substr(first + 1, second - first - 1);
                const std::string order_tok = key.substr(second + 1);
                const auto color = parse_color(color_tok);
                if (!color) fail(errc::unknown_color, "'" + color_tok + "' in key '" + raw_key + "'");
                const auto kind = parse_vehicle_kind(kind_tok);
                if (!kind) fail(errc::unknown_kind, "'" + kind_tok + "' in key '" + raw_key + "'");
                const auto order = detail::parse_positive_int(order_tok);
                if (!order)
                    fail(errc::malformed_json,
                         "'" + raw_key + "': order must be a positive integer");
                obj.attrs = {*order, color, kind};
            } else {
                const std::string prefix = cat.label + " ";
                if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0)
                    fail(errc::malformed_json,
                         "'" + raw_key + "': expected \"" + cat.label + " k\"");
                const auto order = detail::parse_positive_int(key.substr(prefix.size()));
                if (!order)
                    fail(errc::malformed_json,
                         "'" + raw_key + "': rank must be a positive integer");
                obj.attrs.order = *order;
            }
            obj.pos = detail::parse_position(value, "'" + raw_key + "'");
            objects.push_back(obj);
        }

        std::sort(objects.begin(), objects.end(),
                  [](const SceneObject& a, const SceneObject& b) { return a.attrs.order < b.attrs.order; });
        for (size_t i = 1; i < objects.size(); ++i)
            if (objects[i].attrs.order == objects[i - 1].attrs.order)
                fail(errc::duplicate_order, "category '" + cat.name + "' repeats order " +
                                                std::to_string(objects[i].attrs.order));
        if (cat.schema == AttributeSchema::order_only) {
            for (size_t i = 0; i < objects.size(); ++i)
                if (objects[i].attrs.order != static_cast<int>(i) + 1)
                    fail(errc::non_contiguous_index,
                         "category '" + cat.name + "' ranks must be contiguous from 1");
        }
    }

    if (doc.contains(ont.lanes_key)) {
        const nlohmann::json& section = doc[ont.lanes_key];
        if (!section.is_object())
            fail(errc::malformed_json, "'" + ont.lanes_key + "' must be a JSON object");
        std::vector<std::pair<int, Polyline>> lanes;
        for (const auto& [raw_key, value] : section.items()) {
            const std::string key = detail::canonical_key(raw_key);
            const std::string prefix = ont.lane_label + " ";
            if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0)
                fail(errc::malformed_json, "'" + raw_key + "': expected \"" + ont.lane_label + " k\"");
            const auto order = detail::parse_positive_int(key.substr(prefix.size()));
            if (!order)
                fail(errc::malformed_json, "'" + raw_key + "': rank must be a positive integer");
            if (!value.is_array() || value.empty())
                fail(errc::malformed_json, "'" + raw_key + "' must be a nonempty array of points");
            Polyline lane;
            for (const auto& pt : value) lane.points.push_back(detail::parse_position(pt, "'" + raw_key + "'"));
            lanes.emplace_back(*order, std::move(lane));
        }
        std::sort(lanes.begin(), lanes.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < lanes.size(); ++i) {
            if (i > 0 && lanes[i].first == lanes[i - 1].first)
                fail(errc::duplicate_order, "'" + ont.lanes_key + "' repeats rank " +
                                                std::to_string(lanes[i].first));
            if (lanes[i].first != static_cast<int>(i) + 1)
                fail(errc::non_contiguous_index, "'" + ont.lanes_key + "' ranks must be contiguous from 1");
            scene.lanes.push_back(std::move(lanes[i].second));
        }
    }

    if (!doc.contains(ont.self_key))
        fail(errc::missing_self, "document has no '" + ont.self_key + "' entry");
    scene.ego = detail::parse_position(doc[ont.self_key], "'" + ont.self_key + "'");
    if (scene.ego.y != 0.0)
        fail(errc::out_of_range_coordinate, "'" + ont.self_key + "' must sit on row 0");

    return scene;
}

inline std::string object_name(const CategoryDef& cat, const ObjectAttrs& attrs) {
    if (cat.schema == AttributeSchema::full)
        return std::string(to_string(*attrs.color)) + " " + std::string(to_string(*attrs.kind)) +
               " " + std::to_string(attrs.order);
    return cat.label + " " + std::to_string(attrs.order);
}

/// Serialize a scene into the canonical SIG document: fixed key order,
/// lowercase names, objects sorted by order. Integral coordinates are
/// emitted as JSON integers so a parse/serialize round trip is the
/// identity on canonical input.
inline nlohmann::ordered_json sig_to_json(const SigScene& scene, const Ontology& ont = Ontology::standard()) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        const CategoryDef& cat = ont.categories[ci];
        nlohmann::ordered_json section = nlohmann::ordered_json::object();
        for (const SceneObject& obj : scene.categories[ci]) {
            section[object_name(cat, obj.attrs)] = nlohmann::ordered_json::array(
                {detail::coordinate_json(obj.pos.x), detail::coordinate_json(obj.pos.y)});
        }
        doc[cat.json_key] = std::move(section);
        if (ci == 0) {
            nlohmann::ordered_json lanes = nlohmann::ordered_json::object();
            for (size_t li = 0; li < scene.lanes.size(); ++li) {
                nlohmann::ordered_json pts = nlohmann::ordered_json::array();
                for (const GridPos& p : scene.lanes[li].points)
                    pts.push_back(nlohmann::ordered_json::array(
                        {detail::coordinate_json(p.x), detail::coordinate_json(p.y)}));
                lanes[ont.lane_label + " " + std::to_string(li + 1)] = std::move(pts);
            }
            doc[ont.lanes_key] = std::move(lanes);
        }
    }
    doc[ont.self_key] = nlohmann::ordered_json::array(
        {detail::coordinate_json(scene.ego.x), detail::coordinate_json(scene.ego.y)});
    return doc;
}

inline std::string serialize_sig(const SigScene& scene, const Ontology& ont = Ontology::standard()) {
    return sig_to_json(scene, ont).dump();
}

inline SigScene translate_scene(const SigScene& scene, GridPos offset) {
    SigScene out = scene;
    for (auto& cat : out.categories)
        for (auto& obj : cat) obj.pos = obj.pos + offset;
    for (auto& lane : out.lanes)
        for (auto& p : lane.points) p = p + offset;
    out.ego = out.ego + offset;
    return out;
}

/// Translate the predicted scene so its ego coincides with the ground
/// truth ego. Every object moves by the same offset and nothing is
/// clamped back into the grid.
inline SigScene align_ego(const SigScene& pred, const SigScene& gt) {
    return translate_scene(pred, gt.ego - pred.ego);
}

/// Answers to a spatial-relation paragraph: one directional and one
/// proximal label index per template slot.
struct SrpAnswers {
    std::vector<int> directional;
    std::vector<int> proximal;
};

inline SrpAnswers parse_srp_answers(const std::string& text, size_t expected_len) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(errc::malformed_json, "input is not valid JSON");
    if (!doc.is_object() || !doc.contains("answers_directional") || !doc.contains("answers_proximal"))
        fail(errc::malformed_json, "expected keys answers_directional and answers_proximal");

    auto read_list = [&](const char* key, int max_index) {
        const nlohmann::json& arr = doc[key];
        if (!arr.is_array()) fail(errc::malformed_json, std::string(key) + " must be an array");
        if (arr.size() != expected_len)
            fail(errc::length_mismatch, std::string(key) + " has " + std::to_string(arr.size()) +
                                            " entries, expected " + std::to_string(expected_len));
        std::vector<int> out;
        out.reserve(arr.size());
        for (const auto& v : arr) {
            if (!v.is_number_integer() && !v.is_number_unsigned())
                fail(errc::non_integer, std::string(key) + " entries must be raw integers");
            const long long idx = v.get<long long>();
            if (idx < 0 || idx > max_index)
                fail(errc::index_out_of_range, std::string(key) + " index " + std::to_string(idx) +
                                                   " outside [0, " + std::to_string(max_index) + "]");
            out.push_back(static_cast<int>(idx));
        }
        return out;
    };

    SrpAnswers answers;
    answers.directional = read_list("answers_directional", 7);
    answers.proximal = read_list("answers_proximal", 4);
    return answers;
}

}  // namespace sig
