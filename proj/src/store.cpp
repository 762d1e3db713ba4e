#include "rmcodec/store.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rmc::rt {

int SchemaEntity::attribute_index(const std::string& n) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == n) return static_cast<int>(i);
    }
    return -1;
}

int SchemaEntity::end_index(const std::string& n) const {
    for (std::size_t i = 0; i < ends.size(); ++i) {
        if (ends[i].name == n) return static_cast<int>(i);
    }
    return -1;
}

int Schema::entity_index(const std::string& name) const {
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (entities[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

const SchemaEnum* Schema::enumeration(const std::string& name) const {
    for (const SchemaEnum& e : enums) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

namespace {

std::string canonical_schema_text(const Schema& s) {
    std::ostringstream os;
    for (const SchemaEnum& e : s.enums) {
        os << "enum " << e.name << ":";
        for (const std::string& l : e.literals) os << l << ",";
        os << ";";
    }
    for (const SchemaEntity& e : s.entities) {
        os << "entity " << e.name << ":";
        for (const SchemaAttribute& a : e.attributes) {
            os << a.name << "=" << render_type(a.type) << ",";
        }
        for (const SchemaEnd& end : e.ends) {
            os << end.name << (end.mult == Mult::One ? ">one " : ">many ") << end.target << "/"
               << end.inverse << ",";
        }
        os << ";";
    }
    return os.str();
}

} // namespace

std::uint64_t Schema::hash() const {
    std::string text = canonical_schema_text(*this);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

SchemaPtr build_schema(const model::RequirementModel& m) {
    auto schema = std::make_shared<Schema>();
    for (const model::EnumDecl& e : m.enums) {
        schema->enums.push_back(SchemaEnum{e.name, e.literals});
    }
    for (const model::EntityDecl& e : m.entities) {
        SchemaEntity se;
        se.name = e.name;
        for (const model::AttributeDecl& a : e.attributes) {
            se.attributes.push_back(SchemaAttribute{a.name, a.type});
        }
        for (const model::AssociationEnd& end : e.ends) {
            se.ends.push_back(SchemaEnd{end.name, end.target, end.mult, end.inverse,
                                        end.inverse_mult});
        }
        schema->entities.push_back(std::move(se));
    }
    return schema;
}

// ------------------------------------------------------------ EntityStore ---

EntityStore::EntityStore(SchemaPtr schema) : schema_(std::move(schema)) {
    extents_.resize(schema_->entities.size());
}

const std::vector<ObjectRecord>& EntityStore::extent(int entity_index) const {
    return extents_.at(static_cast<std::size_t>(entity_index));
}

const std::vector<ObjectRecord>& EntityStore::extent(const std::string& entity) const {
    return extent(require_entity(entity));
}

int EntityStore::require_entity(const std::string& entity) const {
    int idx = schema_->entity_index(entity);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownEntity, "unknown entity '" + entity + "'");
    }
    return idx;
}

namespace {

Value default_attribute_value(const StaticType& t, const Schema& schema) {
    using K = StaticType::Kind;
    switch (t.kind) {
        case K::Boolean: return false;
        case K::Integer:
        case K::Date: return std::int64_t{0};
        case K::Real: return 0.0;
        case K::String: return std::string{};
        case K::Enum: {
            const SchemaEnum* e = schema.enumeration(t.name);
            return EnumValue{t.name, e && !e->literals.empty() ? e->literals.front() : ""};
        }
        default: return Undefined{};
    }
}

} // namespace

std::uint64_t EntityStore::create(const std::string& entity) {
    int idx = require_entity(entity);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(idx)];
    ObjectRecord rec;
    rec.id = next_id_++;
    rec.entity = idx;
    for (const SchemaAttribute& a : se.attributes) {
        rec.attributes.push_back(default_attribute_value(a.type, *schema_));
    }
    for (const SchemaEnd& end : se.ends) {
        if (end.mult == Mult::One) {
            rec.links.emplace_back(SingleLink{});
        } else {
            rec.links.emplace_back(ManyLink{});
        }
    }
    extents_[static_cast<std::size_t>(idx)].push_back(std::move(rec));
    return extents_[static_cast<std::size_t>(idx)].back().id;
}

bool EntityStore::exists(std::uint64_t id) const { return object(id) != nullptr; }

const ObjectRecord* EntityStore::object(std::uint64_t id) const {
    for (const auto& extent : extents_) {
        for (const ObjectRecord& rec : extent) {
            if (rec.id == id) return &rec;
        }
    }
    return nullptr;
}

ObjectRecord* EntityStore::object(std::uint64_t id) {
    for (auto& extent : extents_) {
        for (ObjectRecord& rec : extent) {
            if (rec.id == id) return &rec;
        }
    }
    return nullptr;
}

ObjectRecord& EntityStore::require(std::uint64_t id) {
    ObjectRecord* rec = object(id);
    if (!rec) {
        throw StoreError(StoreError::Kind::UnknownObject,
                         "unknown object #" + std::to_string(id));
    }
    return *rec;
}

const ObjectRecord& EntityStore::require(std::uint64_t id) const {
    const ObjectRecord* rec = object(id);
    if (!rec) {
        throw StoreError(StoreError::Kind::UnknownObject,
                         "unknown object #" + std::to_string(id));
    }
    return *rec;
}

Value EntityStore::attribute_of(std::uint64_t id, const std::string& name) const {
    const ObjectRecord& rec = require(id);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(rec.entity)];
    int idx = se.attribute_index(name);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + se.name + "' has no attribute '" + name + "'");
    }
    return rec.attributes[static_cast<std::size_t>(idx)];
}

void EntityStore::set_attribute(std::uint64_t id, const std::string& name, Value v) {
    ObjectRecord& rec = require(id);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(rec.entity)];
    int idx = se.attribute_index(name);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + se.name + "' has no attribute '" + name + "'");
    }
    rec.attributes[static_cast<std::size_t>(idx)] = std::move(v);
}

Value EntityStore::link_of(std::uint64_t id, const std::string& end_name) const {
    const ObjectRecord& rec = require(id);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(rec.entity)];
    int idx = se.end_index(end_name);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + se.name + "' has no association '" + end_name + "'");
    }
    const LinkSlot& slot = rec.links[static_cast<std::size_t>(idx)];
    if (const SingleLink* single = std::get_if<SingleLink>(&slot)) {
        if (!single->has_value()) return Undefined{};
        return ObjectRef{**single};
    }
    const ManyLink& many = std::get<ManyLink>(slot);
    ObjectSet set;
    set.reserve(many.size());
    for (std::uint64_t t : many) set.push_back(ObjectRef{t});
    return set;
}

namespace {

struct EndRef {
    const SchemaEnd* end = nullptr;
    LinkSlot* slot = nullptr;
};

} // namespace

void EntityStore::set_one_link(std::uint64_t id, const std::string& end_name,
                               std::optional<std::uint64_t> target) {
    ObjectRecord& rec = require(id);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(rec.entity)];
    int idx = se.end_index(end_name);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + se.name + "' has no association '" + end_name + "'");
    }
    const SchemaEnd& end = se.ends[static_cast<std::size_t>(idx)];
    if (end.mult != Mult::One) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "association '" + end_name + "' is not single-valued");
    }
    SingleLink& slot = std::get<SingleLink>(rec.links[static_cast<std::size_t>(idx)]);

    auto unlink_inverse = [&](std::uint64_t partner) {
        ObjectRecord* p = object(partner);
        if (!p) return;
        const SchemaEntity& pe = schema_->entities[static_cast<std::size_t>(p->entity)];
        int inv = pe.end_index(end.inverse);
        if (inv < 0) return;
        LinkSlot& islot = p->links[static_cast<std::size_t>(inv)];
        if (SingleLink* s = std::get_if<SingleLink>(&islot)) {
            if (*s && **s == id) s->reset();
        } else {
            ManyLink& many = std::get<ManyLink>(islot);
            many.erase(std::remove(many.begin(), many.end(), id), many.end());
        }
    };
    auto link_inverse = [&](std::uint64_t partner) {
        ObjectRecord* p = object(partner);
        if (!p) return;
        const SchemaEntity& pe = schema_->entities[static_cast<std::size_t>(p->entity)];
        int inv = pe.end_index(end.inverse);
        if (inv < 0) return;
        LinkSlot& islot = p->links[static_cast<std::size_t>(inv)];
        if (SingleLink* s = std::get_if<SingleLink>(&islot)) {
            // displace the partner's previous link, keeping the pair consistent
            if (*s && **s != id) {
                ObjectRecord* old = object(**s);
                if (old) {
                    const SchemaEntity& oe =
                        schema_->entities[static_cast<std::size_t>(old->entity)];
                    int oidx = oe.end_index(end_name);
                    if (oidx >= 0) {
                        if (SingleLink* os =
                                std::get_if<SingleLink>(&old->links[static_cast<std::size_t>(oidx)])) {
                            os->reset();
                        }
                    }
                }
            }
            *s = id;
        } else {
            ManyLink& many = std::get<ManyLink>(islot);
            if (std::find(many.begin(), many.end(), id) == many.end()) many.push_back(id);
        }
    };

    if (slot.has_value() && (!target || *slot != *target)) {
        unlink_inverse(*slot);
    }
    if (target && !exists(*target)) {
        throw StoreError(StoreError::Kind::UnknownObject,
                         "link target #" + std::to_string(*target) + " does not exist");
    }
    slot = target ? SingleLink{*target} : SingleLink{};
    if (target) link_inverse(*target);
}

void EntityStore::add_many_link(std::uint64_t id, const std::string& end_name,
                                std::uint64_t target) {
    ObjectRecord& rec = require(id);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(rec.entity)];
    int idx = se.end_index(end_name);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + se.name + "' has no association '" + end_name + "'");
    }
    if (!exists(target)) {
        throw StoreError(StoreError::Kind::UnknownObject,
                         "link target #" + std::to_string(target) + " does not exist");
    }
    ManyLink& many = std::get<ManyLink>(rec.links[static_cast<std::size_t>(idx)]);
    if (std::find(many.begin(), many.end(), target) == many.end()) many.push_back(target);
}

void EntityStore::remove_many_link(std::uint64_t id, const std::string& end_name,
                                   std::uint64_t target) {
    ObjectRecord& rec = require(id);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(rec.entity)];
    int idx = se.end_index(end_name);
    if (idx < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + se.name + "' has no association '" + end_name + "'");
    }
    ManyLink& many = std::get<ManyLink>(rec.links[static_cast<std::size_t>(idx)]);
    many.erase(std::remove(many.begin(), many.end(), target), many.end());
}

Value EntityStore::find(const std::string& entity, const std::string& attribute, ocl::CmpOp op,
                        const Value& value) const {
    ObjectSet matches = select(entity, attribute, op, value);
    if (matches.empty()) return Undefined{};
    return matches.front();
}

ObjectSet EntityStore::select(const std::string& entity, const std::string& attribute,
                              ocl::CmpOp op, const Value& value) const {
    int idx = require_entity(entity);
    const SchemaEntity& se = schema_->entities[static_cast<std::size_t>(idx)];
    int attr = se.attribute_index(attribute);
    int end = attr < 0 ? se.end_index(attribute) : -1;
    if (attr < 0 && end < 0) {
        throw StoreError(StoreError::Kind::UnknownAttribute,
                         "entity '" + entity + "' has no attribute '" + attribute + "'");
    }
    ObjectSet out;
    for (const ObjectRecord& rec : extents_[static_cast<std::size_t>(idx)]) {
        Value lhs;
        if (attr >= 0) {
            lhs = rec.attributes[static_cast<std::size_t>(attr)];
        } else {
            lhs = link_of(rec.id, attribute);
        }
        if (compare_values(lhs, op, value)) out.push_back(ObjectRef{rec.id});
    }
    return out;
}

void EntityStore::release(std::uint64_t id) {
    bool found = false;
    for (auto& extent : extents_) {
        auto it = std::find_if(extent.begin(), extent.end(),
                               [&](const ObjectRecord& r) { return r.id == id; });
        if (it != extent.end()) {
            extent.erase(it);
            found = true;
            break;
        }
    }
    if (!found) {
        throw StoreError(StoreError::Kind::UnknownObject,
                         "unknown object #" + std::to_string(id));
    }
    // Clear every link pointing at the released object.
    for (auto& extent : extents_) {
        for (ObjectRecord& rec : extent) {
            for (LinkSlot& slot : rec.links) {
                if (SingleLink* single = std::get_if<SingleLink>(&slot)) {
                    if (*single && **single == id) single->reset();
                } else {
                    ManyLink& many = std::get<ManyLink>(slot);
                    many.erase(std::remove(many.begin(), many.end(), id), many.end());
                }
            }
        }
    }
}

std::size_t EntityStore::object_count() const {
    std::size_t n = 0;
    for (const auto& extent : extents_) n += extent.size();
    return n;
}

bool EntityStore::operator==(const EntityStore& other) const {
    if (next_id_ != other.next_id_) return false;
    if (!schema_ != !other.schema_) return false;
    if (schema_ && !(*schema_ == *other.schema_)) return false;
    return extents_ == other.extents_;
}

// ------------------------------------------------------------- comparison ---

bool compare_values(const Value& lhs, ocl::CmpOp op, const Value& rhs) {
    using ocl::CmpOp;
    if (is_undefined(lhs) || is_undefined(rhs)) return false;

    auto outcome = [op](int cmp) {
        switch (op) {
            case CmpOp::Eq: return cmp == 0;
            case CmpOp::Ne: return cmp != 0;
            case CmpOp::Lt: return cmp < 0;
            case CmpOp::Le: return cmp <= 0;
            case CmpOp::Gt: return cmp > 0;
            case CmpOp::Ge: return cmp >= 0;
        }
        return false;
    };

    // Numeric comparison covers Integer/Date and Real mixes.
    const std::int64_t* li = std::get_if<std::int64_t>(&lhs);
    const std::int64_t* ri = std::get_if<std::int64_t>(&rhs);
    const double* lr = std::get_if<double>(&lhs);
    const double* rr = std::get_if<double>(&rhs);
    if ((li || lr) && (ri || rr)) {
        if (li && ri) return outcome(*li < *ri ? -1 : (*li > *ri ? 1 : 0));
        double a = li ? static_cast<double>(*li) : *lr;
        double b = ri ? static_cast<double>(*ri) : *rr;
        return outcome(a < b ? -1 : (a > b ? 1 : 0));
    }
    if (const std::string* ls = std::get_if<std::string>(&lhs)) {
        const std::string* rs = std::get_if<std::string>(&rhs);
        if (!rs) return false;
        int cmp = ls->compare(*rs);
        return outcome(cmp < 0 ? -1 : (cmp > 0 ? 1 : 0));
    }
    if (const bool* lb = std::get_if<bool>(&lhs)) {
        const bool* rb = std::get_if<bool>(&rhs);
        if (!rb) return false;
        if (op == CmpOp::Eq) return *lb == *rb;
        if (op == CmpOp::Ne) return *lb != *rb;
        return false;
    }
    if (const EnumValue* le = std::get_if<EnumValue>(&lhs)) {
        const EnumValue* re = std::get_if<EnumValue>(&rhs);
        if (!re) return false;
        bool eq = *le == *re;
        if (op == CmpOp::Eq) return eq;
        if (op == CmpOp::Ne) return !eq;
        return false;
    }
    if (const ObjectRef* lo = std::get_if<ObjectRef>(&lhs)) {
        const ObjectRef* ro = std::get_if<ObjectRef>(&rhs);
        if (!ro) return false;
        if (op == CmpOp::Eq) return lo->id == ro->id;
        if (op == CmpOp::Ne) return lo->id != ro->id;
        return false;
    }
    if (const ObjectSet* ls = std::get_if<ObjectSet>(&lhs)) {
        const ObjectSet* rs = std::get_if<ObjectSet>(&rhs);
        if (!rs) return false;
        // set semantics: element order does not matter
        ObjectSet a = *ls;
        ObjectSet b = *rs;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (op == CmpOp::Eq) return a == b;
        if (op == CmpOp::Ne) return a != b;
        return false;
    }
    return false;
}

// ------------------------------------------------------------ persistence ---

namespace {

// Escapes the format's structural characters inside strings.
std::string escape_field(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '|': out += "\\|"; break;
            case ';': out += "\\;"; break;
            case '=': out += "\\="; break;
            case ',': out += "\\,"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string real_text(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string attribute_text(const Value& v) {
    struct V {
        std::string operator()(const Undefined&) const { return "-"; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return real_text(d); }
        std::string operator()(const std::string& s) const { return escape_field(s); }
        std::string operator()(const EnumValue& e) const { return e.literal; }
        std::string operator()(const ObjectRef& r) const { return std::to_string(r.id); }
        std::string operator()(const ObjectSet&) const { return "-"; }
    };
    return std::visit(V{}, v);
}

struct FieldSplitter {
    // Splits on a separator, honoring backslash escapes.
    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        for (std::size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (c == '\\' && i + 1 < s.size()) {
                cur += c;
                cur += s[++i];
                continue;
            }
            if (c == sep) {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    }

    static std::string unescape(const std::string& s, bool& ok) {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (c != '\\') {
                out += c;
                continue;
            }
            if (i + 1 >= s.size()) {
                ok = false;
                return out;
            }
            char e = s[++i];
            switch (e) {
                case 'n': out += '\n'; break;
                case 'r': out += '\r'; break;
                default: out += e;
            }
        }
        return out;
    }
};

Value parse_attribute_text(const std::string& text, const StaticType& type, const Schema& schema,
                           bool& ok) {
    using K = StaticType::Kind;
    ok = true;
    switch (type.kind) {
        case K::Boolean:
            if (text == "true") return true;
            if (text == "false") return false;
            ok = false;
            return Undefined{};
        case K::Integer:
        case K::Date: {
            char* endp = nullptr;
            long long v = std::strtoll(text.c_str(), &endp, 10);
            ok = endp && *endp == '\0' && !text.empty();
            return static_cast<std::int64_t>(v);
        }
        case K::Real: {
            char* endp = nullptr;
            double v = std::strtod(text.c_str(), &endp);
            ok = endp && *endp == '\0' && !text.empty();
            return v;
        }
        case K::String: {
            bool esc_ok = true;
            std::string s = FieldSplitter::unescape(text, esc_ok);
            ok = esc_ok;
            return s;
        }
        case K::Enum: {
            const SchemaEnum* e = schema.enumeration(type.name);
            if (e && e->has_literal(text)) return EnumValue{type.name, text};
            ok = false;
            return Undefined{};
        }
        default:
            ok = false;
            return Undefined{};
    }
}

} // namespace

bool SchemaEnum::has_literal(const std::string& lit) const {
    return std::find(literals.begin(), literals.end(), lit) != literals.end();
}

std::string save_store(const EntityStore& store) {
    std::ostringstream os;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, store.schema().hash());
    os << "#schema " << hash << "\n";
    os << "#next " << store.next_id() << "\n";
    for (std::size_t ei = 0; ei < store.schema().entities.size(); ++ei) {
        const SchemaEntity& se = store.schema().entities[ei];
        for (const ObjectRecord& rec : store.extent(static_cast<int>(ei))) {
            os << se.name << '|' << rec.id << '|';
            for (std::size_t ai = 0; ai < se.attributes.size(); ++ai) {
                if (ai) os << ';';
                os << se.attributes[ai].name << '=' << attribute_text(rec.attributes[ai]);
            }
            os << '|';
            for (std::size_t li = 0; li < se.ends.size(); ++li) {
                if (li) os << ';';
                os << se.ends[li].name << '=';
                const LinkSlot& slot = rec.links[li];
                if (const SingleLink* single = std::get_if<SingleLink>(&slot)) {
                    if (single->has_value()) {
                        os << **single;
                    } else {
                        os << '-';
                    }
                } else {
                    const ManyLink& many = std::get<ManyLink>(slot);
                    for (std::size_t k = 0; k < many.size(); ++k) {
                        if (k) os << ',';
                        os << many[k];
                    }
                }
            }
            os << '\n';
        }
    }
    return os.str();
}

void save_store_file(const EntityStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw StoreError(StoreError::Kind::Io, "cannot open '" + path + "' for writing");
    }
    out << save_store(store);
    if (!out) {
        throw StoreError(StoreError::Kind::Io, "failed writing '" + path + "'");
    }
}

EntityStore load_store(const std::string& text, SchemaPtr schema) {
    EntityStore store(schema);
    std::istringstream is(text);
    std::string line;
    int lineno = 0;

    auto format_error = [&](const std::string& msg) {
        throw StoreError(StoreError::Kind::Format,
                         "store line " + std::to_string(lineno) + ": " + msg);
    };

    if (!std::getline(is, line)) format_error("missing #schema header");
    ++lineno;
    if (line.rfind("#schema ", 0) != 0) format_error("missing #schema header");
    {
        char expected[32];
        std::snprintf(expected, sizeof expected, "%016" PRIx64, schema->hash());
        if (line.substr(8) != expected) {
            throw StoreError(StoreError::Kind::SchemaMismatch,
                             "store was saved against a different model (hash " + line.substr(8) +
                                 ", expected " + expected + ")");
        }
    }
    if (!std::getline(is, line)) format_error("missing #next header");
    ++lineno;
    if (line.rfind("#next ", 0) != 0) format_error("missing #next header");
    std::uint64_t next_id = std::strtoull(line.c_str() + 6, nullptr, 10);

    std::uint64_t max_id = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> parts = FieldSplitter::split(line, '|');
        if (parts.size() != 4) format_error("expected entity|id|attrs|links");
        const std::string& entity = parts[0];
        int ei = schema->entity_index(entity);
        if (ei < 0) {
            throw StoreError(StoreError::Kind::SchemaMismatch,
                             "store line " + std::to_string(lineno) + ": unknown entity '" +
                                 entity + "'");
        }
        const SchemaEntity& se = schema->entities[static_cast<std::size_t>(ei)];
        ObjectRecord rec;
        rec.entity = ei;
        char* endp = nullptr;
        rec.id = std::strtoull(parts[1].c_str(), &endp, 10);
        if (!endp || *endp != '\0' || rec.id == 0) format_error("bad object id");
        max_id = std::max(max_id, rec.id);

        std::vector<std::string> attrs =
            parts[2].empty() ? std::vector<std::string>{} : FieldSplitter::split(parts[2], ';');
        if (attrs.size() != se.attributes.size()) {
            format_error("expected " + std::to_string(se.attributes.size()) + " attributes for '" +
                         entity + "'");
        }
        for (std::size_t ai = 0; ai < attrs.size(); ++ai) {
            std::vector<std::string> kv = FieldSplitter::split(attrs[ai], '=');
            if (kv.size() != 2 || kv[0] != se.attributes[ai].name) {
                format_error("attribute " + std::to_string(ai) + " must be '" +
                             se.attributes[ai].name + "='");
            }
            bool ok = true;
            rec.attributes.push_back(
                parse_attribute_text(kv[1], se.attributes[ai].type, *schema, ok));
            if (!ok) format_error("bad value for attribute '" + se.attributes[ai].name + "'");
        }

        std::vector<std::string> links =
            parts[3].empty() ? std::vector<std::string>{} : FieldSplitter::split(parts[3], ';');
        if (links.size() != se.ends.size()) {
            format_error("expected " + std::to_string(se.ends.size()) + " links for '" + entity +
                         "'");
        }
        for (std::size_t li = 0; li < links.size(); ++li) {
            std::vector<std::string> kv = FieldSplitter::split(links[li], '=');
            if (kv.size() != 2 || kv[0] != se.ends[li].name) {
                format_error("link " + std::to_string(li) + " must be '" + se.ends[li].name + "='");
            }
            if (se.ends[li].mult == Mult::One) {
                if (kv[1] == "-") {
                    rec.links.emplace_back(SingleLink{});
                } else {
                    std::uint64_t target = std::strtoull(kv[1].c_str(), &endp, 10);
                    if (!endp || *endp != '\0') format_error("bad link id");
                    rec.links.emplace_back(SingleLink{target});
                }
            } else {
                ManyLink many;
                if (!kv[1].empty()) {
                    for (const std::string& part : FieldSplitter::split(kv[1], ',')) {
                        std::uint64_t target = std::strtoull(part.c_str(), &endp, 10);
                        if (!endp || *endp != '\0') format_error("bad link id");
                        many.push_back(target);
                    }
                }
                rec.links.emplace_back(std::move(many));
            }
        }
        store.extents_[static_cast<std::size_t>(ei)].push_back(std::move(rec));
    }

    // Referential integrity of loaded links.
    for (const auto& extent : store.extents_) {
        for (const ObjectRecord& rec : extent) {
            for (const LinkSlot& slot : rec.links) {
                if (const SingleLink* single = std::get_if<SingleLink>(&slot)) {
                    if (*single && !store.exists(**single)) {
                        throw StoreError(StoreError::Kind::Format,
                                         "dangling link to #" + std::to_string(**single));
                    }
                } else {
                    for (std::uint64_t t : std::get<ManyLink>(slot)) {
                        if (!store.exists(t)) {
                            throw StoreError(StoreError::Kind::Format,
                                             "dangling link to #" + std::to_string(t));
                        }
                    }
                }
            }
        }
    }

    if (next_id <= max_id) {
        throw StoreError(StoreError::Kind::Format, "#next must exceed every object id");
    }
    store.next_id_ = next_id;
    return store;
}

EntityStore load_store_file(const std::string& path, SchemaPtr schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StoreError(StoreError::Kind::Io, "cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_store(buf.str(), std::move(schema));
}

} // namespace rmc::rt
