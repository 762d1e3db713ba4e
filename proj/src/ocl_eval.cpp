#include "rmcodec/ocl_eval.hpp"

#include <algorithm>
#include <cmath>

namespace rmc::ocl {

namespace {

class Evaluator {
public:
    Evaluator(const rt::EntityStore& pre, const rt::EntityStore& post, const Bindings& bindings,
              const EvalHooks* hooks)
        : pre_(pre), post_(post), bindings_(bindings), hooks_(hooks) {}

    Value eval(const Expr& e) {
        if (hooks_ && hooks_->on_eval) hooks_->on_eval(e);
        return std::visit([&](const auto& node) { return eval_node(e, node); }, e.node);
    }

private:
    const rt::EntityStore& pre_;
    const rt::EntityStore& post_;
    const Bindings& bindings_;
    const EvalHooks* hooks_;
    std::vector<std::pair<std::string, Value>> locals_;

    bool truthy(const Value& v) const {
        if (const bool* b = std::get_if<bool>(&v)) return *b;
        if (is_undefined(v)) return false; // two-valued logic: undefined guards fail
        throw EvalError("non-boolean value in boolean position");
    }

    const Value* lookup(const std::string& name) const {
        for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
            if (it->first == name) return &it->second;
        }
        auto it = bindings_.find(name);
        return it == bindings_.end() ? nullptr : &it->second;
    }

    // Member read against one state; missing objects and members behave as
    // undefined-rooted navigation.
    Value member_read(const rt::EntityStore& state, std::uint64_t id, const std::string& member) {
        const rt::ObjectRecord* rec = state.object(id);
        if (!rec) return Undefined{};
        const rt::SchemaEntity& se = state.schema().entities[static_cast<std::size_t>(rec->entity)];
        int attr = se.attribute_index(member);
        if (attr >= 0) return rec->attributes[static_cast<std::size_t>(attr)];
        int end = se.end_index(member);
        if (end >= 0) return state.link_of(id, member);
        throw EvalError("object #" + std::to_string(id) + " has no member '" + member +
                        "' (checker bug)");
    }

    Value eval_node(const Expr&, const BoolLit& n) { return n.value; }
    Value eval_node(const Expr&, const IntLit& n) { return n.value; }
    Value eval_node(const Expr&, const RealLit& n) { return n.value; }
    Value eval_node(const Expr&, const StrLit& n) { return n.value; }
    Value eval_node(const Expr&, const EnumLit& n) { return EnumValue{n.enum_name, n.literal}; }

    Value eval_node(const Expr& e, const VarRef& n) {
        const Value* v = lookup(n.name);
        if (!v) throw EvalError("unbound variable '" + n.name + "' at " + render_expr(e));
        return *v;
    }

    Value eval_node(const Expr&, const Nav& n) {
        Value source = eval(*n.source);
        if (is_undefined(source)) return Undefined{};
        const ObjectRef* ref = std::get_if<ObjectRef>(&source);
        if (!ref) throw EvalError("navigation from non-object value (checker bug)");
        return member_read(n.at_pre ? pre_ : post_, ref->id, n.member);
    }

    Value eval_node(const Expr&, const AllInstances& n) {
        int idx = post_.schema().entity_index(n.entity);
        if (idx < 0) throw EvalError("unknown entity '" + n.entity + "'");
        ObjectSet out;
        for (const rt::ObjectRecord& rec : post_.extent(idx)) out.push_back(ObjectRef{rec.id});
        return out;
    }

    Value eval_node(const Expr&, const Iter& n) {
        Value source = eval(*n.source);
        if (is_undefined(source)) return Undefined{};
        const ObjectSet* set = std::get_if<ObjectSet>(&source);
        if (!set) throw EvalError("iteration over non-set value (checker bug)");
        if (n.kind == IterKind::Any) {
            for (const ObjectRef& ref : *set) {
                locals_.emplace_back(n.var, ref);
                bool hit = truthy(eval(*n.body));
                locals_.pop_back();
                if (hit) return ref;
            }
            return Undefined{};
        }
        ObjectSet out;
        for (const ObjectRef& ref : *set) {
            locals_.emplace_back(n.var, ref);
            bool hit = truthy(eval(*n.body));
            locals_.pop_back();
            if (hit) out.push_back(ref);
        }
        return out;
    }

    Value eval_node(const Expr&, const CollectionOp& n) {
        Value source = eval(*n.source);
        if (is_undefined(source)) return Undefined{};
        const ObjectSet* set = std::get_if<ObjectSet>(&source);
        if (!set) throw EvalError("collection operation on non-set value (checker bug)");
        auto contains = [&](const ObjectRef& ref) {
            return std::find(set->begin(), set->end(), ref) != set->end();
        };
        switch (n.op) {
            case CollOp::Size: return static_cast<std::int64_t>(set->size());
            case CollOp::IsEmpty: return set->empty();
            case CollOp::NotEmpty: return !set->empty();
            case CollOp::Includes:
            case CollOp::Excludes: {
                Value arg = eval(*n.arg);
                if (is_undefined(arg)) return n.op == CollOp::Excludes;
                const ObjectRef* ref = std::get_if<ObjectRef>(&arg);
                if (!ref) throw EvalError("includes/excludes argument is not an object");
                bool in = contains(*ref);
                return n.op == CollOp::Includes ? in : !in;
            }
            case CollOp::IncludesAll:
            case CollOp::ExcludesAll: {
                Value arg = eval(*n.arg);
                if (is_undefined(arg)) return n.op == CollOp::ExcludesAll;
                const ObjectSet* other = std::get_if<ObjectSet>(&arg);
                if (!other) throw EvalError("includesAll/excludesAll argument is not a set");
                if (n.op == CollOp::IncludesAll) {
                    return std::all_of(other->begin(), other->end(), contains);
                }
                return std::none_of(other->begin(), other->end(), contains);
            }
        }
        throw EvalError("unhandled collection operation");
    }

    Value eval_node(const Expr&, const StandardOp& n) {
        Value source = eval(*n.source);
        if (n.op == StdOp::OclIsUndefined) {
            if (is_undefined(source)) return true;
            if (const ObjectRef* ref = std::get_if<ObjectRef>(&source)) {
                return !post_.exists(ref->id); // released objects are undefined
            }
            return false;
        }
        // oclIsNew: exists now, did not exist in the pre-state snapshot
        if (is_undefined(source)) return false;
        const ObjectRef* ref = std::get_if<ObjectRef>(&source);
        if (!ref) throw EvalError("oclIsNew on non-object value (checker bug)");
        return post_.exists(ref->id) && !pre_.exists(ref->id);
    }

    Value eval_node(const Expr&, const Compare& n) {
        Value lhs = eval(*n.lhs);
        Value rhs = eval(*n.rhs);
        return rt::compare_values(lhs, n.op, rhs);
    }

    Value eval_node(const Expr&, const Arith& n) {
        Value lhs = eval(*n.lhs);
        Value rhs = eval(*n.rhs);
        if (is_undefined(lhs) || is_undefined(rhs)) return Undefined{};
        const std::int64_t* li = std::get_if<std::int64_t>(&lhs);
        const std::int64_t* ri = std::get_if<std::int64_t>(&rhs);
        if (li && ri) {
            switch (n.op) {
                case ArithOp::Add: return *li + *ri;
                case ArithOp::Sub: return *li - *ri;
                case ArithOp::Mul: return *li * *ri;
                case ArithOp::Div:
                    if (*ri == 0) throw EvalError("division by zero");
                    return *li / *ri;
            }
        }
        const double* lr = std::get_if<double>(&lhs);
        const double* rr = std::get_if<double>(&rhs);
        if ((li || lr) && (ri || rr)) {
            double a = li ? static_cast<double>(*li) : *lr;
            double b = ri ? static_cast<double>(*ri) : *rr;
            switch (n.op) {
                case ArithOp::Add: return a + b;
                case ArithOp::Sub: return a - b;
                case ArithOp::Mul: return a * b;
                case ArithOp::Div:
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
            }
        }
        throw EvalError("arithmetic on non-numeric values (checker bug)");
    }

    Value eval_node(const Expr&, const BoolBin& n) {
        bool lhs = truthy(eval(*n.lhs));
        if (n.op == BoolKind::And) {
            if (!lhs) return false;
            return truthy(eval(*n.rhs));
        }
        if (lhs) return true;
        return truthy(eval(*n.rhs));
    }

    Value eval_node(const Expr&, const NotExpr& n) { return !truthy(eval(*n.operand)); }

    Value eval_node(const Expr&, const IfExpr& n) {
        return truthy(eval(*n.cond)) ? eval(*n.then_branch) : eval(*n.else_branch);
    }

    Value eval_node(const Expr&, const LetExpr& n) {
        std::size_t pushed = 0;
        for (const LetBinding& b : n.bindings) {
            Value v = eval(*b.value);
            locals_.emplace_back(b.name, std::move(v));
            ++pushed;
        }
        Value out = eval(*n.body);
        while (pushed--) locals_.pop_back();
        return out;
    }
};

} // namespace

Value evaluate(const Expr& expr, const rt::EntityStore& pre, const rt::EntityStore& post,
               const Bindings& bindings, const EvalHooks* hooks) {
    Evaluator ev(pre, post, bindings, hooks);
    return ev.eval(expr);
}

} // namespace rmc::ocl
