#pragma once

#include <abnet/core/errors.hpp>

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <string>

namespace abnet {

/// Substitutes the knob `"$name"` throughout a spec template.
///
/// Inside an atom's delta a non-integer value v is realized by splitting the
/// atom into floor(v) with weight 1 − frac(v) and ceil(v) with weight
/// frac(v); every knob coordinate of the atom moves together, so the
/// expected delta is exact. Anywhere else the value is inserted as a number.
inline nlohmann::json instantiate_template(const nlohmann::json& tmpl, const std::string& name, double value) {
    using nlohmann::json;
    const std::string token = "$" + name;
    const double lo = std::floor(value);
    const double frac = value - lo;

    auto is_token = [&](const json& j) { return j.is_string() && j.get<std::string>() == token; };
    auto integral = [](double x) -> json { return static_cast<std::int64_t>(x); };

    std::function<json(const json&)> substitute = [&](const json& j) -> json {
        if (is_token(j)) {
            if (frac == 0.0) return integral(value);
            return value;
        }
        if (j.is_string() && j.get<std::string>().starts_with("$"))
            throw SchemaError("template: unbound variable '" + j.get<std::string>() + "'");
        if (j.is_object()) {
            json out = json::object();
            for (const auto& [k, v] : j.items()) out[k] = substitute(v);
            return out;
        }
        if (j.is_array()) {
            json out = json::array();
            for (const auto& v : j) out.push_back(substitute(v));
            return out;
        }
        return j;
    };

    json rules = json::object();
    if (tmpl.contains("rules") && tmpl.at("rules").is_object()) {
        for (const auto& [key, atoms] : tmpl.at("rules").items()) {
            if (!atoms.is_array()) throw SchemaError("template: rules." + key + " must be an array");
            json out_atoms = json::array();
            for (const auto& atom : atoms) {
                bool has_knob = false;
                if (atom.contains("delta") && atom.at("delta").is_object())
                    for (const auto& [w, d] : atom.at("delta").items()) has_knob = has_knob || is_token(d);
                if (!has_knob || frac == 0.0) {
                    out_atoms.push_back(substitute(atom));
                    continue;
                }
                const double prob = substitute(atom.at("prob")).get<double>();
                for (const auto& [level, weight] : {std::pair{lo, 1.0 - frac}, std::pair{lo + 1.0, frac}}) {
                    json split = substitute(atom);
                    for (auto& [w, d] : split["delta"].items())
                        if (is_token(atom.at("delta").at(w))) d = integral(level);
                    split["prob"] = prob * weight;
                    out_atoms.push_back(std::move(split));
                }
            }
            rules[key] = std::move(out_atoms);
        }
    }
    json out = json::object();
    for (const auto& [k, v] : tmpl.items()) out[k] = k == "rules" ? rules : substitute(v);
    return out;
}

}  // namespace abnet
