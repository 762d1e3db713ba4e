#include "rmcodec/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rmc::rt {

using actions::ActionKind;
using actions::AtomicAction;
using actions::EffectConditional;
using actions::EffectItem;
using actions::EffectLet;
using actions::GuardTree;

namespace {

struct ExecFault : std::runtime_error {
    explicit ExecFault(const std::string& what) : std::runtime_error(what) {}
};

struct GuardFailure {
    const AtomicAction* leaf = nullptr;
};

class Runner {
public:
    Runner(const logic::BusinessLogicUnit& unit, const EntityStore& pre, EntityStore& current,
           ocl::Bindings& bindings, std::set<std::uint64_t>& touched)
        : unit_(unit), pre_(pre), current_(current), bindings_(bindings), touched_(touched) {}

    void run_definitions() {
        for (const AtomicAction& a : unit_.definition_block) {
            bindings_[a.var] = run_find(a);
        }
    }

    // Left-to-right short-circuit evaluation; records the first leaf that
    // evaluated to false for the failure descriptor.
    bool eval_guard(const GuardTree& tree) {
        switch (tree.kind) {
            case GuardTree::Kind::True:
                return true;
            case GuardTree::Kind::Leaf: {
                const AtomicAction& a = unit_.guard_actions[tree.leaf];
                bool v = eval_leaf(a);
                if (!v && !first_false_) first_false_ = &a;
                return v;
            }
            case GuardTree::Kind::And:
                for (const GuardTree& child : tree.children) {
                    if (!eval_guard(child)) return false;
                }
                return true;
            case GuardTree::Kind::Or:
                for (const GuardTree& child : tree.children) {
                    if (eval_guard(child)) return true;
                }
                return false;
            case GuardTree::Kind::Not:
                return !eval_guard(tree.children[0]);
            case GuardTree::Kind::If:
                return eval_guard(tree.children[0]) ? eval_guard(tree.children[1])
                                                    : eval_guard(tree.children[2]);
        }
        return false;
    }

    // Branch conditions evaluate against dedicated action lists.
    bool eval_branch(const GuardTree& tree, const std::vector<AtomicAction>& leaves) {
        switch (tree.kind) {
            case GuardTree::Kind::True:
                return true;
            case GuardTree::Kind::Leaf:
                return eval_leaf(leaves[tree.leaf]);
            case GuardTree::Kind::And:
                for (const GuardTree& child : tree.children) {
                    if (!eval_branch(child, leaves)) return false;
                }
                return true;
            case GuardTree::Kind::Or:
                for (const GuardTree& child : tree.children) {
                    if (eval_branch(child, leaves)) return true;
                }
                return false;
            case GuardTree::Kind::Not:
                return !eval_branch(tree.children[0], leaves);
            case GuardTree::Kind::If:
                return eval_branch(tree.children[0], leaves)
                           ? eval_branch(tree.children[1], leaves)
                           : eval_branch(tree.children[2], leaves);
        }
        return false;
    }

    void apply_effects(const std::vector<EffectItem>& items) {
        for (const EffectItem& item : items) {
            if (const auto* a = std::get_if<AtomicAction>(&item)) {
                apply_action(*a);
            } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
                if (eval_branch(cond->condition, cond->condition_actions)) {
                    apply_effects(cond->then_items);
                } else {
                    apply_effects(cond->else_items);
                }
            } else {
                const auto& let = std::get<EffectLet>(item);
                std::vector<std::pair<std::string, std::optional<Value>>> shadowed;
                for (const auto& [name, value] : let.bindings) {
                    auto it = bindings_.find(name);
                    shadowed.emplace_back(name, it == bindings_.end()
                                                    ? std::nullopt
                                                    : std::optional<Value>(it->second));
                    bindings_[name] = eval_value(*value);
                }
                apply_effects(let.items);
                for (auto it = shadowed.rbegin(); it != shadowed.rend(); ++it) {
                    if (it->second) {
                        bindings_[it->first] = *it->second;
                    } else {
                        bindings_.erase(it->first);
                    }
                }
            }
        }
    }

    const AtomicAction* first_false() const { return first_false_; }

private:
    const logic::BusinessLogicUnit& unit_;
    const EntityStore& pre_;
    EntityStore& current_;
    ocl::Bindings& bindings_;
    std::set<std::uint64_t>& touched_;
    const AtomicAction* first_false_ = nullptr;

    Value eval_value(const ocl::Expr& e) {
        try {
            return ocl::evaluate(e, pre_, current_, bindings_);
        } catch (const ocl::EvalError& err) {
            throw ExecFault(err.what());
        }
    }

    std::uint64_t require_object(const AtomicAction& a) {
        auto it = bindings_.find(a.var);
        if (it == bindings_.end()) {
            throw ExecFault("variable '" + a.var + "' is unbound");
        }
        if (is_undefined(it->second)) {
            throw ExecFault("variable '" + a.var + "' is undefined in " + render_action(a));
        }
        const ObjectRef* ref = std::get_if<ObjectRef>(&it->second);
        if (!ref || !current_.exists(ref->id)) {
            throw ExecFault("variable '" + a.var + "' does not name a live object");
        }
        touched_.insert(ref->id);
        return ref->id;
    }

    Value run_find(const AtomicAction& a) {
        if (a.kind == ActionKind::FindAssociationObject ||
            a.kind == ActionKind::FindAssociationObjects) {
            auto it = bindings_.find(a.entity_var);
            if (it == bindings_.end()) throw ExecFault("variable '" + a.entity_var + "' unbound");
            if (is_undefined(it->second)) return Undefined{};
            const ObjectRef* ref = std::get_if<ObjectRef>(&it->second);
            if (!ref) throw ExecFault("variable '" + a.entity_var + "' is not an object");
            if (!current_.exists(ref->id)) return Undefined{};
            touched_.insert(ref->id);
            return current_.link_of(ref->id, a.member);
        }

        // findObject / findObjects: scan the extent in insertion order.
        std::vector<Value> values;
        values.reserve(a.conditions.size());
        for (const actions::FindCondition& c : a.conditions) {
            values.push_back(eval_value(*c.value));
        }
        int entity_index = current_.schema().entity_index(a.entity);
        if (entity_index < 0) throw ExecFault("unknown entity '" + a.entity + "'");
        const SchemaEntity& se = current_.schema().entities[static_cast<std::size_t>(entity_index)];
        ObjectSet matches;
        for (const ObjectRecord& rec : current_.extent(entity_index)) {
            bool hit = true;
            for (std::size_t i = 0; i < a.conditions.size(); ++i) {
                const actions::FindCondition& c = a.conditions[i];
                Value lhs;
                if (se.attribute_index(c.attribute) >= 0) {
                    lhs = current_.attribute_of(rec.id, c.attribute);
                } else if (se.end_index(c.attribute) >= 0) {
                    lhs = current_.link_of(rec.id, c.attribute);
                } else {
                    throw ExecFault("entity '" + a.entity + "' has no member '" + c.attribute +
                                    "'");
                }
                if (!compare_values(lhs, c.op, values[i])) {
                    hit = false;
                    break;
                }
            }
            if (hit) {
                touched_.insert(rec.id);
                matches.push_back(ObjectRef{rec.id});
                if (a.kind == ActionKind::FindObject) break;
            }
        }
        if (a.kind == ActionKind::FindObject) {
            if (matches.empty()) return Undefined{};
            return matches.front();
        }
        return matches;
    }

    // Standard operation result on an object-valued binding.
    bool std_op_result(const std::string& member, const Value& operand) {
        if (member == std::string("oclIsUndefined")) {
            if (is_undefined(operand)) return true;
            if (const ObjectRef* ref = std::get_if<ObjectRef>(&operand)) {
                return !current_.exists(ref->id);
            }
            return false;
        }
        if (member == std::string("oclIsNew")) {
            if (const ObjectRef* ref = std::get_if<ObjectRef>(&operand)) {
                return current_.exists(ref->id) && !pre_.exists(ref->id);
            }
            return false;
        }
        throw ExecFault("unknown standard operation '" + member + "'");
    }

    Value collection_op_result(const AtomicAction& a, const Value& source) {
        if (is_undefined(source)) return Undefined{};
        const ObjectSet* set = std::get_if<ObjectSet>(&source);
        if (!set) throw ExecFault("collection operand is not a set in " + render_action(a));
        const std::string& op = a.member;
        if (op == "size") return static_cast<std::int64_t>(set->size());
        if (op == "isEmpty") return set->empty();
        if (op == "notEmpty") return !set->empty();
        if (op == "includes" || op == "excludes") {
            Value arg = eval_value(*a.value2);
            if (is_undefined(arg)) return op == "excludes";
            const ObjectRef* ref = std::get_if<ObjectRef>(&arg);
            if (!ref) throw ExecFault("includes/excludes argument is not an object");
            bool in = std::find(set->begin(), set->end(), *ref) != set->end();
            return op == "includes" ? in : !in;
        }
        if (op == "includesAll" || op == "excludesAll") {
            Value arg = eval_value(*a.value2);
            if (is_undefined(arg)) return op == "excludesAll";
            const ObjectSet* other = std::get_if<ObjectSet>(&arg);
            if (!other) throw ExecFault("includesAll/excludesAll argument is not a set");
            auto contains = [&](const ObjectRef& r) {
                return std::find(set->begin(), set->end(), r) != set->end();
            };
            if (op == "includesAll") return std::all_of(other->begin(), other->end(), contains);
            return std::none_of(other->begin(), other->end(), contains);
        }
        throw ExecFault("unknown collection operation '" + op + "'");
    }

    bool eval_leaf(const AtomicAction& a) {
        switch (a.kind) {
            case ActionKind::CheckAttributeState: {
                auto it = bindings_.find(a.var);
                if (it == bindings_.end()) throw ExecFault("variable '" + a.var + "' unbound");
                if (is_undefined(it->second)) return false;
                const ObjectRef* ref = std::get_if<ObjectRef>(&it->second);
                if (!ref) throw ExecFault("variable '" + a.var + "' is not an object");
                const EntityStore& state = a.at_pre ? pre_ : current_;
                const ObjectRecord* rec = state.object(ref->id);
                if (!rec) return false;
                touched_.insert(ref->id);
                const SchemaEntity& se =
                    state.schema().entities[static_cast<std::size_t>(rec->entity)];
                Value lhs;
                if (se.attribute_index(a.member) >= 0) {
                    lhs = state.attribute_of(ref->id, a.member);
                } else if (se.end_index(a.member) >= 0) {
                    lhs = state.link_of(ref->id, a.member);
                } else {
                    throw ExecFault("no member '" + a.member + "' in " + render_action(a));
                }
                return compare_values(lhs, a.op, eval_value(*a.value));
            }
            case ActionKind::CheckObjectState: {
                auto it = bindings_.find(a.var);
                if (it == bindings_.end()) throw ExecFault("variable '" + a.var + "' unbound");
                Value lhs = std_op_result(a.member, it->second);
                return compare_values(lhs, a.op, eval_value(*a.value));
            }
            case ActionKind::StandardOperationToObject: {
                auto it = bindings_.find(a.var);
                if (it == bindings_.end()) throw ExecFault("variable '" + a.var + "' unbound");
                return std_op_result(a.member, it->second);
            }
            case ActionKind::CheckCollectionState: {
                Value source = eval_value(*a.source);
                Value lhs = collection_op_result(a, source);
                if (is_undefined(lhs)) return false;
                return compare_values(lhs, a.op, eval_value(*a.value));
            }
            case ActionKind::StandardOperationToObjects: {
                Value source = eval_value(*a.source);
                Value v = collection_op_result(a, source);
                if (is_undefined(v)) return false;
                const bool* b = std::get_if<bool>(&v);
                if (!b) throw ExecFault("collection guard is not boolean: " + render_action(a));
                return *b;
            }
            default:
                throw ExecFault("non-guard action in guard position: " + render_action(a));
        }
    }

    Value arith_apply(ocl::ArithOp op, const Value& lhs, const Value& rhs) {
        if (is_undefined(lhs) || is_undefined(rhs)) {
            throw ExecFault("arithmetic on undefined value");
        }
        const std::int64_t* li = std::get_if<std::int64_t>(&lhs);
        const std::int64_t* ri = std::get_if<std::int64_t>(&rhs);
        if (li && ri) {
            switch (op) {
                case ocl::ArithOp::Add: return *li + *ri;
                case ocl::ArithOp::Sub: return *li - *ri;
                case ocl::ArithOp::Mul: return *li * *ri;
                case ocl::ArithOp::Div:
                    if (*ri == 0) throw ExecFault("division by zero");
                    return *li / *ri;
            }
        }
        const double* lr = std::get_if<double>(&lhs);
        const double* rr = std::get_if<double>(&rhs);
        if ((li || lr) && (ri || rr)) {
            double a = li ? static_cast<double>(*li) : *lr;
            double b = ri ? static_cast<double>(*ri) : *rr;
            switch (op) {
                case ocl::ArithOp::Add: return a + b;
                case ocl::ArithOp::Sub: return a - b;
                case ocl::ArithOp::Mul: return a * b;
                case ocl::ArithOp::Div:
                    if (b == 0.0) throw ExecFault("division by zero");
                    return a / b;
            }
        }
        throw ExecFault("arithmetic on non-numeric values");
    }

    // Checked attribute assignment; Integer values promote to Real slots.
    void assign_attribute(std::uint64_t id, const std::string& member, Value v,
                          const AtomicAction& a) {
        const ObjectRecord* rec = current_.object(id);
        const SchemaEntity& se =
            current_.schema().entities[static_cast<std::size_t>(rec->entity)];
        int idx = se.attribute_index(member);
        if (idx < 0) throw ExecFault("no attribute '" + member + "' in " + render_action(a));
        const StaticType& t = se.attributes[static_cast<std::size_t>(idx)].type;
        using K = StaticType::Kind;
        if (is_undefined(v)) throw ExecFault("attribute update value is undefined");
        switch (t.kind) {
            case K::Integer:
            case K::Date:
                if (!std::holds_alternative<std::int64_t>(v)) {
                    throw ExecFault("value for '" + member + "' is not an integer");
                }
                break;
            case K::Real:
                if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) {
                    v = static_cast<double>(*i);
                } else if (!std::holds_alternative<double>(v)) {
                    throw ExecFault("value for '" + member + "' is not a number");
                }
                break;
            case K::Boolean:
                if (!std::holds_alternative<bool>(v)) {
                    throw ExecFault("value for '" + member + "' is not a boolean");
                }
                break;
            case K::String:
                if (!std::holds_alternative<std::string>(v)) {
                    throw ExecFault("value for '" + member + "' is not a string");
                }
                break;
            case K::Enum: {
                const EnumValue* ev = std::get_if<EnumValue>(&v);
                if (!ev || ev->enum_name != t.name) {
                    throw ExecFault("value for '" + member + "' is not a " + t.name + " literal");
                }
                break;
            }
            default:
                throw ExecFault("attribute '" + member + "' has unsupported type");
        }
        current_.set_attribute(id, member, std::move(v));
        touched_.insert(id);
    }

    std::uint64_t require_target(const ocl::Expr& e, const AtomicAction& a) {
        Value v = eval_value(e);
        if (is_undefined(v)) {
            throw ExecFault("association target is undefined in " + render_action(a));
        }
        const ObjectRef* ref = std::get_if<ObjectRef>(&v);
        if (!ref || !current_.exists(ref->id)) {
            throw ExecFault("association target is not a live object in " + render_action(a));
        }
        touched_.insert(ref->id);
        return ref->id;
    }

    void apply_action(const AtomicAction& a) {
        try {
            switch (a.kind) {
                case ActionKind::CreateObject: {
                    std::uint64_t id = current_.create(a.entity);
                    bindings_[a.var] = ObjectRef{id};
                    touched_.insert(id);
                    return;
                }
                case ActionKind::AddOneToOneAssociation: {
                    std::uint64_t ob = require_object(a);
                    std::uint64_t target = require_target(*a.value, a);
                    current_.set_one_link(ob, a.member, target);
                    return;
                }
                case ActionKind::AddOneToManyAssociation: {
                    std::uint64_t ob = require_object(a);
                    std::uint64_t target = require_target(*a.value, a);
                    current_.add_many_link(ob, a.member, target);
                    return;
                }
                case ActionKind::RemoveOneToManyAssociation: {
                    std::uint64_t ob = require_object(a);
                    std::uint64_t target = require_target(*a.value, a);
                    current_.remove_many_link(ob, a.member, target);
                    return;
                }
                case ActionKind::RemoveOneToOneAssociation: {
                    std::uint64_t ob = require_object(a);
                    current_.set_one_link(ob, a.member, std::nullopt);
                    return;
                }
                case ActionKind::UpdateObject: {
                    std::uint64_t ob = require_object(a);
                    if (!pre_.exists(ob)) {
                        throw ExecFault("updateObject on object without a pre-state");
                    }
                    Value old = pre_.attribute_of(ob, a.member);
                    Value rhs = eval_value(*a.value);
                    assign_attribute(ob, a.member, arith_apply(a.arith_op, old, rhs), a);
                    return;
                }
                case ActionKind::UpdateObjectWithNew: {
                    std::uint64_t ob = require_object(a);
                    assign_attribute(ob, a.member, eval_value(*a.value), a);
                    return;
                }
                case ActionKind::ReleaseObject: {
                    std::uint64_t ob = require_object(a);
                    current_.release(ob);
                    return;
                }
                default:
                    throw ExecFault("non-effect action in effect position: " + render_action(a));
            }
        } catch (const StoreError& err) {
            throw ExecFault(err.what());
        }
    }
};

bool value_matches_type(const Value& v, const StaticType& t) {
    using K = StaticType::Kind;
    switch (t.kind) {
        case K::Integer:
        case K::Date: return std::holds_alternative<std::int64_t>(v);
        case K::Real:
            return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
        case K::Boolean: return std::holds_alternative<bool>(v);
        case K::String: return std::holds_alternative<std::string>(v);
        case K::Enum: {
            const EnumValue* ev = std::get_if<EnumValue>(&v);
            return ev && ev->enum_name == t.name;
        }
        default: return false;
    }
}

} // namespace

ExecutionResult execute(const logic::BusinessLogicUnit& unit, EntityStore& store,
                        const ocl::Bindings& inputs, const ExecContext& ctx) {
    ExecutionResult result;
    auto started = std::chrono::steady_clock::now();
    auto finish = [&](ExecutionResult&& r) {
        auto ended = std::chrono::steady_clock::now();
        r.exec_ms = std::chrono::duration<double, std::milli>(ended - started).count();
        return std::move(r);
    };

    // input arity and types
    if (inputs.size() != unit.signature.inputs.size()) {
        result.outcome = RuntimeFault{"operation '" + unit.signature.operation + "' expects " +
                                      std::to_string(unit.signature.inputs.size()) + " inputs"};
        return finish(std::move(result));
    }
    for (const model::ParamDecl& p : unit.signature.inputs) {
        auto it = inputs.find(p.name);
        if (it == inputs.end()) {
            result.outcome = RuntimeFault{"missing input '" + p.name + "'"};
            return finish(std::move(result));
        }
        if (!value_matches_type(it->second, p.type)) {
            result.outcome = RuntimeFault{"input '" + p.name + "' does not match its declared " +
                                          render_type(p.type)};
            return finish(std::move(result));
        }
    }

    ocl::Bindings bindings = inputs;
    // promote integer inputs bound to Real parameters
    for (const model::ParamDecl& p : unit.signature.inputs) {
        if (p.type.kind == StaticType::Kind::Real) {
            if (const std::int64_t* i = std::get_if<std::int64_t>(&bindings[p.name])) {
                bindings[p.name] = static_cast<double>(*i);
            }
        }
    }
    bindings["today"] = ctx.today;

    const EntityStore pre = store; // pre-state snapshot

    Runner runner(unit, pre, store, bindings, result.touched);
    try {
        runner.run_definitions();
        // Guard runs against the untouched store (current == pre content).
        if (!runner.eval_guard(unit.guard)) {
            const AtomicAction* leaf = runner.first_false();
            PreconditionFailure failure;
            failure.operation = unit.signature.operation;
            failure.clause = leaf ? render_action(*leaf) : "precondition not satisfied";
            failure.span = leaf ? leaf->span : Span{};
            result.outcome = std::move(failure);
            result.bindings = std::move(bindings);
            return finish(std::move(result));
        }
    } catch (const ExecFault& fault) {
        result.outcome = RuntimeFault{fault.what()};
        result.bindings = std::move(bindings);
        return finish(std::move(result));
    } catch (const StoreError& err) {
        result.outcome = RuntimeFault{err.what()};
        result.bindings = std::move(bindings);
        return finish(std::move(result));
    }

    // Effects mutate a working copy; the store commits only on success.
    EntityStore working = store;
    try {
        Runner effects(unit, pre, working, bindings, result.touched);
        effects.apply_effects(unit.effect_block);
        Value out;
        if (unit.result_expr) {
            out = ocl::evaluate(*unit.result_expr, pre, working, bindings);
        } else {
            out = true;
        }
        bindings["result"] = out;
        store = std::move(working);
        result.outcome = Success{std::move(out)};
        result.bindings = std::move(bindings);
        return finish(std::move(result));
    } catch (const ExecFault& fault) {
        result.outcome = RuntimeFault{fault.what()};
    } catch (const StoreError& err) {
        result.outcome = RuntimeFault{err.what()};
    } catch (const ocl::EvalError& err) {
        result.outcome = RuntimeFault{err.what()};
    }
    result.bindings = std::move(bindings);
    return finish(std::move(result));
}

} // namespace rmc::rt
