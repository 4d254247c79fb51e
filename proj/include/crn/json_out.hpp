#pragma once

#include "crn/rational.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace crn {

using Json = nlohmann::ordered_json;

namespace detail {

inline void write_json(const Json& j, std::string& out, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                write_json(it.value(), out, indent, depth + 1);
            }
            newline(depth);
            out.push_back('}');
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out.push_back('[');
            bool first = true;
            for (const auto& v : j) {
                if (!first) out.push_back(',');
                first = false;
                newline(depth + 1);
                write_json(v, out, indent, depth + 1);
            }
            newline(depth);
            out.push_back(']');
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Serializes with every double at 17 significant digits. indent < 0
/// gives the compact form.
inline std::string dump_json(const Json& j, int indent = 2) {
    std::string out;
    detail::write_json(j, out, indent, 0);
    return out;
}

/// Integers become JSON numbers, everything else a "p/q" string.
inline Json rational_json(const Rational& q) {
    if (is_integer(q)) {
        const Integer n = boost::multiprecision::numerator(q);
        if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
            return Json(n.convert_to<long long>());
    }
    return Json(to_fraction_string(q));
}

inline Json rational_vector_json(const RationalVector& v) {
    Json arr = Json::array();
    for (const auto& x : v) arr.push_back(rational_json(x));
    return arr;
}

}  // namespace crn
