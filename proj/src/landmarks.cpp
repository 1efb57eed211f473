#include "vton/landmarks.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vton {

namespace {

std::string fmt6(double v) {
    // Canonical fixed 6-decimal form; -0.000000 normalizes to 0.000000.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::vector<Landmark> parse_landmark_array(const nlohmann::json& arr,
                                           std::size_t expected,
                                           const char* key) {
    if (!arr.is_array() || arr.size() != expected) {
        throw std::invalid_argument(std::string("annotation: ") + key + " must hold exactly " +
                                    std::to_string(expected) + " entries");
    }
    std::vector<Landmark> out;
    out.reserve(expected);
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number()) {
            throw std::invalid_argument(std::string("annotation: ") + key +
                                        " entries must be [x, y, visible]");
        }
        Landmark lm;
        lm.x = e[0].get<double>();
        lm.y = e[1].get<double>();
        if (e[2].is_boolean()) {
            lm.visible = e[2].get<bool>();
        } else if (e[2].is_number()) {
            lm.visible = e[2].get<double>() != 0.0;
        } else {
            throw std::invalid_argument(std::string("annotation: ") + key +
                                        " visibility must be a boolean or 0/1");
        }
        out.push_back(lm);
    }
    return out;
}

void check_bounds(const std::vector<Landmark>& lms, const LandmarkAnnotation& a,
                  const char* key) {
    const double max_x = a.space == CoordinateSpace::pixel ? static_cast<double>(a.width) : 1.0;
    const double max_y = a.space == CoordinateSpace::pixel ? static_cast<double>(a.height) : 1.0;
    for (const auto& lm : lms) {
        if (!(lm.x >= 0.0 && lm.x <= max_x && lm.y >= 0.0 && lm.y <= max_y)) {
            throw std::invalid_argument(std::string("annotation: ") + key +
                                        " coordinate outside image bounds");
        }
    }
}

void append_landmarks(std::string& out, const std::vector<Landmark>& lms) {
    out += '[';
    for (std::size_t i = 0; i < lms.size(); ++i) {
        if (i) out += ',';
        out += '[';
        out += fmt6(lms[i].x);
        out += ',';
        out += fmt6(lms[i].y);
        out += ',';
        out += lms[i].visible ? "true" : "false";
        out += ']';
    }
    out += ']';
}

bool collinear(const std::vector<Vec2>& pts) {
    // Max doubled triangle area against the first edge pair, relative to scale.
    if (pts.size() < 3) return true;
    double scale = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        scale = std::max(scale, distance(pts[0], pts[i]));
    }
    if (scale == 0.0) return true;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const Vec2 u = pts[i] - pts[0];
            const Vec2 v = pts[j] - pts[0];
            const double cross = u.x * v.y - u.y * v.x;
            if (std::abs(cross) > 1e-12 * scale * scale) return false;
        }
    }
    return true;
}

} // namespace

LandmarkAnnotation parse_annotation(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("annotation: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("annotation: top level must be an object");

    LandmarkAnnotation a;
    if (!j.contains("image") || !j["image"].is_string())
        throw std::invalid_argument("annotation: missing string field 'image'");
    a.image_path = j["image"].get<std::string>();

    if (!j.contains("width") || !j["width"].is_number_integer() || j["width"].get<int>() <= 0)
        throw std::invalid_argument("annotation: 'width' must be a positive integer");
    if (!j.contains("height") || !j["height"].is_number_integer() || j["height"].get<int>() <= 0)
        throw std::invalid_argument("annotation: 'height' must be a positive integer");
    a.width = j["width"].get<int>();
    a.height = j["height"].get<int>();

    if (!j.contains("space") || !j["space"].is_string())
        throw std::invalid_argument("annotation: missing string field 'space'");
    const std::string space = j["space"].get<std::string>();
    if (space == "pixel") {
        a.space = CoordinateSpace::pixel;
    } else if (space == "normalized") {
        a.space = CoordinateSpace::normalized;
    } else {
        throw std::invalid_argument("annotation: 'space' must be \"pixel\" or \"normalized\"");
    }

    if (!j.contains("human_landmarks"))
        throw std::invalid_argument("annotation: missing 'human_landmarks'");
    a.human_landmarks =
        parse_landmark_array(j["human_landmarks"], kHumanLandmarkCount, "human_landmarks");
    check_bounds(a.human_landmarks, a, "human_landmarks");

    if (j.contains("fashion_landmarks")) {
        a.fashion_landmarks =
            parse_landmark_array(j["fashion_landmarks"], kFashionLandmarkCount, "fashion_landmarks");
        check_bounds(*a.fashion_landmarks, a, "fashion_landmarks");
    }
    return a;
}

std::string serialize_annotation(const LandmarkAnnotation& a) {
    if (a.human_landmarks.size() != kHumanLandmarkCount)
        throw std::invalid_argument("annotation: human_landmarks must hold exactly 9 entries");
    if (a.fashion_landmarks && a.fashion_landmarks->size() != kFashionLandmarkCount)
        throw std::invalid_argument("annotation: fashion_landmarks must hold exactly 6 entries");
    if (a.width <= 0 || a.height <= 0)
        throw std::invalid_argument("annotation: dimensions must be positive");

    // Keys emitted in sorted order; landmark floats fixed at 6 decimals.
    std::string out = "{";
    if (a.fashion_landmarks) {
        out += "\"fashion_landmarks\":";
        append_landmarks(out, *a.fashion_landmarks);
        out += ',';
    }
    out += "\"height\":" + std::to_string(a.height) + ',';
    out += "\"human_landmarks\":";
    append_landmarks(out, a.human_landmarks);
    out += ',';
    out += "\"image\":" + nlohmann::json(a.image_path).dump() + ',';
    out += std::string("\"space\":\"") +
           (a.space == CoordinateSpace::pixel ? "pixel" : "normalized") + "\",";
    out += "\"width\":" + std::to_string(a.width);
    out += "}\n";
    return out;
}

LandmarkAnnotation load_annotation(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open annotation file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_annotation(ss.str());
}

void save_annotation(const LandmarkAnnotation& a, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write annotation file: " + path);
    out << serialize_annotation(a);
}

LandmarkAnnotation normalize_landmarks(const LandmarkAnnotation& a) {
    if (a.space != CoordinateSpace::pixel)
        throw std::invalid_argument("normalize_landmarks: annotation is not in pixel space");
    if (a.width <= 0 || a.height <= 0)
        throw std::invalid_argument("normalize_landmarks: zero image dimensions");
    LandmarkAnnotation out = a;
    out.space = CoordinateSpace::normalized;
    auto scale = [&](std::vector<Landmark>& lms) {
        for (auto& lm : lms) {
            lm.x /= a.width;
            lm.y /= a.height;
        }
    };
    scale(out.human_landmarks);
    if (out.fashion_landmarks) scale(*out.fashion_landmarks);
    return out;
}

LandmarkAnnotation denormalize_landmarks(const LandmarkAnnotation& a) {
    if (a.space != CoordinateSpace::normalized)
        throw std::invalid_argument("denormalize_landmarks: annotation is not normalized");
    LandmarkAnnotation out = a;
    out.space = CoordinateSpace::pixel;
    auto scale = [&](std::vector<Landmark>& lms) {
        for (auto& lm : lms) {
            lm.x *= a.width;
            lm.y *= a.height;
        }
    };
    scale(out.human_landmarks);
    if (out.fashion_landmarks) scale(*out.fashion_landmarks);
    return out;
}

ControlPairs build_control_pairs(const LandmarkAnnotation& model,
                                 const LandmarkAnnotation& person,
                                 const std::vector<Landmark>& model_fashion,
                                 const std::vector<Landmark>& target_fashion) {
    if (model.space != CoordinateSpace::normalized || person.space != CoordinateSpace::normalized)
        throw std::invalid_argument("build_control_pairs: annotations must be normalized");
    if (model.human_landmarks.size() != kHumanLandmarkCount ||
        person.human_landmarks.size() != kHumanLandmarkCount)
        throw std::invalid_argument("build_control_pairs: human landmark count mismatch");
    if (model_fashion.size() != target_fashion.size())
        throw std::invalid_argument("build_control_pairs: fashion landmark count mismatch");

    ControlPairs pairs;
    auto keep = [&](const Landmark& s, const Landmark& t) {
        if (!s.visible || !t.visible) return;
        pairs.source.push_back({s.x, s.y});
        pairs.target.push_back({t.x, t.y});
    };
    for (int i = 0; i < kHumanLandmarkCount; ++i)
        keep(model.human_landmarks[i], person.human_landmarks[i]);
    for (std::size_t i = 0; i < model_fashion.size(); ++i)
        keep(model_fashion[i], target_fashion[i]);

    if (pairs.count() < 3)
        throw std::invalid_argument("build_control_pairs: fewer than 3 visible pairs");
    if (collinear(pairs.source) || collinear(pairs.target))
        throw std::invalid_argument("build_control_pairs: surviving pairs are collinear");
    return pairs;
}

} // namespace vton
