#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rmc {

// Undefined is a first-class runtime value (null-object semantics), never an
// exception: contracts test it with oclIsUndefined().
struct Undefined {
    bool operator==(const Undefined&) const = default;
};

struct ObjectRef {
    std::uint64_t id = 0;
    auto operator<=>(const ObjectRef&) const = default;
};

// Insertion-ordered set of object references; uniqueness is maintained by the
// store operations, not by this alias.
using ObjectSet = std::vector<ObjectRef>;

struct EnumValue {
    std::string enum_name;
    std::string literal;
    bool operator==(const EnumValue&) const = default;
};

// Date values are carried as std::int64_t (days since epoch), same as Integer;
// the static type layer keeps them apart.
using Value = std::variant<Undefined, bool, std::int64_t, double, std::string,
                           EnumValue, ObjectRef, ObjectSet>;

inline bool is_undefined(const Value& v) { return std::holds_alternative<Undefined>(v); }

// Debug/CLI rendering: `Undefined`, `true`, `42`, `1.5`, `"s"`, `Level::MASTER`,
// `#7`, `[#1, #3]`.
std::string render_value(const Value& v);

} // namespace rmc
