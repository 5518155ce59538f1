#pragma once

#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "factorball/point.hpp"

namespace factorball {

using nlohmann::json;

/// Strict-parsing helper: every key of obj must appear in allowed.
inline void require_keys_subset(const json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known)
            throw std::invalid_argument(where + ": unknown field '" + item.key() + "'");
    }
}

inline const json& require_field(const json& obj, const std::string& where,
                                 const char* key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw std::invalid_argument(where + ": missing field '" + key + "'");
    return *it;
}

inline Vec vec_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        throw std::invalid_argument(where + ": expected a numeric array");
    Vec v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw std::invalid_argument(where + ": expected a numeric array");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

inline json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace factorball
