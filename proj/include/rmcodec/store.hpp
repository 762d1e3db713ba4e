#pragma once

#include "rmcodec/model.hpp"
#include "rmcodec/ocl_ast.hpp"
#include "rmcodec/types.hpp"
#include "rmcodec/value.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rmc::rt {

struct StoreError : std::runtime_error {
    enum class Kind { UnknownEntity, UnknownAttribute, UnknownObject, Io, Format, SchemaMismatch };
    Kind kind;
    StoreError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

struct SchemaAttribute {
    std::string name;
    StaticType type;
    bool operator==(const SchemaAttribute&) const = default;
};

struct SchemaEnd {
    std::string name;
    std::string target;
    Mult mult = Mult::One;
    std::string inverse;
    Mult inverse_mult = Mult::One;
    bool operator==(const SchemaEnd&) const = default;
};

struct SchemaEntity {
    std::string name;
    std::vector<SchemaAttribute> attributes;
    std::vector<SchemaEnd> ends;
    bool operator==(const SchemaEntity&) const = default;

    int attribute_index(const std::string& n) const;
    int end_index(const std::string& n) const;
};

struct SchemaEnum {
    std::string name;
    std::vector<std::string> literals;
    bool operator==(const SchemaEnum&) const = default;
    bool has_literal(const std::string& lit) const;
};

// The persistence-layer schema: entity shapes plus enums, decoupled from the
// requirement model's AST so stores can outlive it.
struct Schema {
    std::vector<SchemaEntity> entities;
    std::vector<SchemaEnum> enums;
    bool operator==(const Schema&) const = default;

    int entity_index(const std::string& name) const;
    const SchemaEnum* enumeration(const std::string& name) const;

    // FNV-1a over the canonical schema text; identifies the model a store
    // file was saved against.
    std::uint64_t hash() const;
};

using SchemaPtr = std::shared_ptr<const Schema>;

SchemaPtr build_schema(const model::RequirementModel& m);

// One-to-one links hold an optional id; one-to-many links hold an
// insertion-ordered set of ids.
using SingleLink = std::optional<std::uint64_t>;
using ManyLink = std::vector<std::uint64_t>;
using LinkSlot = std::variant<SingleLink, ManyLink>;

struct ObjectRecord {
    std::uint64_t id = 0;
    int entity = -1; // index into Schema::entities
    std::vector<Value> attributes;  // parallel to SchemaEntity::attributes
    std::vector<LinkSlot> links;    // parallel to SchemaEntity::ends
    bool operator==(const ObjectRecord&) const = default;
};

// In-memory object graph: one insertion-ordered extent per entity; object ids
// are unique store-wide and never reused.
class EntityStore {
public:
    EntityStore() = default;
    explicit EntityStore(SchemaPtr schema);

    const Schema& schema() const { return *schema_; }
    SchemaPtr schema_ptr() const { return schema_; }
    std::uint64_t next_id() const { return next_id_; }
    void set_next_id(std::uint64_t v) { next_id_ = v; }

    const std::vector<ObjectRecord>& extent(int entity_index) const;
    const std::vector<ObjectRecord>& extent(const std::string& entity) const;

    // Entity-manager surface.
    std::uint64_t create(const std::string& entity);
    Value find(const std::string& entity, const std::string& attribute, ocl::CmpOp op,
               const Value& value) const; // first match or Undefined
    ObjectSet select(const std::string& entity, const std::string& attribute, ocl::CmpOp op,
                     const Value& value) const;
    void release(std::uint64_t id);

    bool exists(std::uint64_t id) const;
    const ObjectRecord* object(std::uint64_t id) const;
    ObjectRecord* object(std::uint64_t id);

    Value attribute_of(std::uint64_t id, const std::string& name) const;
    void set_attribute(std::uint64_t id, const std::string& name, Value v);

    // Raw link accessors; shape must match the end's multiplicity.
    Value link_of(std::uint64_t id, const std::string& end_name) const; // ObjectRef/ObjectSet/Undefined

    // One-to-one end assignment with inverse maintenance: the displaced
    // partner (if any) is unlinked on both sides, then the new link is set in
    // both directions.
    void set_one_link(std::uint64_t id, const std::string& end_name, std::optional<std::uint64_t> target);

    // Insertion-ordered set add/remove on a many end. Idempotent: adding a
    // present id or removing an absent one is a no-op self.
    void add_many_link(std::uint64_t id, const std::string& end_name, std::uint64_t target);
    void remove_many_link(std::uint64_t id, const std::string& end_name, std::uint64_t target);

    std::size_t object_count() const;

    bool operator==(const EntityStore& other) const;

private:
    friend EntityStore load_store(const std::string& text, SchemaPtr schema);

    SchemaPtr schema_;
    std::vector<std::vector<ObjectRecord>> extents_;
    std::uint64_t next_id_ = 1;

    ObjectRecord& require(std::uint64_t id);
    const ObjectRecord& require(std::uint64_t id) const;
    int require_entity(const std::string& entity) const;
};

// Runtime comparison used by find/select and the evaluator. Comparisons with
// Undefined are false; Eq/Ne cover every type, orderings only ordered ones.
bool compare_values(const Value& lhs, ocl::CmpOp op, const Value& rhs);

// Line-oriented store file format (documented in docs/store-format.md):
//   #schema <hash>
//   #next <id>
//   entity|id|attr=value;...|assoc=ids;...
// Round-trips byte-identically: save(load(save(s))) == save(s).
std::string save_store(const EntityStore& store);
void save_store_file(const EntityStore& store, const std::string& path);
EntityStore load_store(const std::string& text, SchemaPtr schema);
EntityStore load_store_file(const std::string& path, SchemaPtr schema);

} // namespace rmc::rt
