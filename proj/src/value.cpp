#include "rmcodec/value.hpp"

#include "rmcodec/types.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace rmc {

std::string render_type(const StaticType& t) {
    using K = StaticType::Kind;
    switch (t.kind) {
        case K::Invalid: return "<invalid>";
        case K::Boolean: return "Boolean";
        case K::Integer: return "Integer";
        case K::Real: return "Real";
        case K::String: return "String";
        case K::Date: return "Date";
        case K::Enum: return t.name;
        case K::Object: return t.name;
        case K::Set: return "Set(" + t.name + ")";
    }
    return "<invalid>";
}

namespace {

// Shortest decimal form that parses back to the same double.
std::string render_real(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    std::string s = buf;
    // keep Real literals visually distinct from Integer ones
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

} // namespace

std::string render_value(const Value& v) {
    struct Renderer {
        std::string operator()(const Undefined&) const { return "Undefined"; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return render_real(d); }
        std::string operator()(const std::string& s) const { return '"' + s + '"'; }
        std::string operator()(const EnumValue& e) const { return e.enum_name + "::" + e.literal; }
        std::string operator()(const ObjectRef& r) const { return "#" + std::to_string(r.id); }
        std::string operator()(const ObjectSet& set) const {
            std::string out = "[";
            for (std::size_t i = 0; i < set.size(); ++i) {
                if (i) out += ", ";
                out += "#" + std::to_string(set[i].id);
            }
            out += "]";
            return out;
        }
    };
    return std::visit(Renderer{}, v);
}

} // namespace rmc
