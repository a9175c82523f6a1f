#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "lps/config.hpp"
#include "lps/family.hpp"
#include "lps/parser.hpp"

namespace lps {

// Insertion-ordered JSON keeps report bytes reproducible.
using Json = nlohmann::ordered_json;

inline Json vec2_json(const Vec2& v) { return Json::array({v.x, v.y}); }

inline Json family_to_json(const FamilySpec& spec) {
    Json j;
    j["variant"] = variant_name(spec.variant);
    j["alpha"] = to_string(spec.alpha);
    j["r_squared"] = to_string(spec.r2);
    j["f"] = spec.f.to_text();
    Json gl = Json::array();
    for (const auto& g : spec.gluing) {
        Json e;
        e["x"] = g.approx.x;
        e["y"] = g.approx.y;
        if (g.exact) {
            e["exact_x"] = to_string(g.exact->first);
            e["exact_y"] = to_string(g.exact->second);
        } else {
            e["exact_x"] = nullptr;
            e["exact_y"] = nullptr;
        }
        gl.push_back(e);
    }
    j["gluing"] = gl;
    j["H"] = spec.H.to_text();
    j["P"] = spec.P.to_text();
    j["Q"] = spec.Q.to_text();
    Json led;
    led["degree_f"] = spec.ledger.degree_f;
    led["edge_count"] = spec.ledger.edge_count;
    led["degree_h"] = spec.ledger.degree_h;
    led["degree_field"] = spec.ledger.degree_field;
    led["full_bound"] = spec.ledger.full_bound;
    led["star_exact"] = spec.ledger.star_exact;
    led["harnack_ok"] = spec.ledger.harnack_ok;
    led["full_bound_ok"] = spec.ledger.full_bound_ok;
    led["star_exact_ok"] = spec.ledger.star_exact_ok;
    led["degree_h_le_2m"] = spec.ledger.remark_2m;
    led["degree_h_le_mm2_plus2"] = spec.ledger.remark_mm2_plus2;
    led["degree_h_le_mm2_plus4"] = spec.ledger.remark_mm2_plus4;
    led["violated"] = spec.ledger.violated;
    led["note"] = spec.ledger.note;
    j["degree_ledger"] = led;
    return j;
}

inline FamilySpec family_from_json(const Json& j) {
    FamilySpec spec;
    spec.variant = j.at("variant").get<std::string>() == "star" ? Variant::kStar : Variant::kFull;
    spec.alpha = parse_rational(j.at("alpha").get<std::string>());
    spec.r2 = parse_rational(j.at("r_squared").get<std::string>());
    spec.f = parse_polynomial(j.at("f").get<std::string>());
    for (const auto& e : j.at("gluing")) {
        GluingCoordinate g;
        g.approx = {e.at("x").get<double>(), e.at("y").get<double>()};
        if (!e.at("exact_x").is_null()) {
            g.exact = {parse_rational(e.at("exact_x").get<std::string>()),
                       parse_rational(e.at("exact_y").get<std::string>())};
        }
        spec.gluing.push_back(g);
    }
    spec.H = parse_polynomial(j.at("H").get<std::string>());
    spec.P = parse_polynomial(j.at("P").get<std::string>());
    spec.Q = parse_polynomial(j.at("Q").get<std::string>());
    spec.r_hat = std::ceil(std::sqrt(to_double(spec.r2)));
    spec.ledger = check_degree_bound(spec.f, spec);
    return spec;
}

}  // namespace lps
