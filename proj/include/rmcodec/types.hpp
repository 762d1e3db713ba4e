#pragma once

#include <string>

namespace rmc {

enum class Mult { One, Many };

// Static type of an expression or declaration. `name` carries the enum name
// for Enum and the entity name for Object/Set.
struct StaticType {
    enum class Kind {
        Invalid,
        Boolean,
        Integer,
        Real,
        String,
        Date,
        Enum,
        Object,
        Set,
    };

    Kind kind = Kind::Invalid;
    std::string name;

    bool operator==(const StaticType&) const = default;

    bool is_numeric() const { return kind == Kind::Integer || kind == Kind::Real || kind == Kind::Date; }
    bool is_primitive() const {
        return kind == Kind::Boolean || kind == Kind::Integer || kind == Kind::Real ||
               kind == Kind::String || kind == Kind::Date;
    }
};

inline StaticType boolean_type() { return {StaticType::Kind::Boolean, {}}; }
inline StaticType integer_type() { return {StaticType::Kind::Integer, {}}; }
inline StaticType real_type() { return {StaticType::Kind::Real, {}}; }
inline StaticType string_type() { return {StaticType::Kind::String, {}}; }
inline StaticType date_type() { return {StaticType::Kind::Date, {}}; }
inline StaticType enum_type(std::string name) { return {StaticType::Kind::Enum, std::move(name)}; }
inline StaticType object_type(std::string entity) { return {StaticType::Kind::Object, std::move(entity)}; }
inline StaticType set_type(std::string entity) { return {StaticType::Kind::Set, std::move(entity)}; }

// `Integer`, `Set(Book)`, `CopyStatus`, ...
std::string render_type(const StaticType& t);

} // namespace rmc
