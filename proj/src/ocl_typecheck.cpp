#include "rmcodec/ocl_parser.hpp"

#include <vector>

namespace rmc::ocl {

namespace {

using Kind = StaticType::Kind;

class Checker {
public:
    Checker(const TypeEnv& env, ExprContext ctx, Diagnostics& diags)
        : env_(env), ctx_(ctx), diags_(diags) {}

    bool check(Expr& e) { return check_expr(e); }

private:
    const TypeEnv& env_;
    ExprContext ctx_;
    Diagnostics& diags_;
    std::vector<std::pair<std::string, StaticType>> scope_;

    bool fail(Expr& e, Code code, const std::string& msg) {
        diags_.add(code, e.span, msg);
        e.type = StaticType{};
        return false;
    }

    const StaticType* lookup(const std::string& name) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
            if (it->first == name) return &it->second;
        }
        return env_.lookup(name);
    }

    bool check_bool_operand(Expr& e) {
        if (!check_expr(e)) return false;
        if (e.type.kind != Kind::Boolean) {
            return fail(e, Code::TypeError,
                        "expected Boolean operand, found " + render_type(e.type));
        }
        return true;
    }

    static bool numeric_pair(Kind a, Kind b) {
        auto num = [](Kind k) { return k == Kind::Integer || k == Kind::Real || k == Kind::Date; };
        return num(a) && num(b);
    }

    bool check_expr(Expr& e) {
        struct V {
            Checker& c;
            Expr& e;

            bool operator()(BoolLit&) { e.type = boolean_type(); return true; }
            bool operator()(IntLit&) { e.type = integer_type(); return true; }
            bool operator()(RealLit&) { e.type = real_type(); return true; }
            bool operator()(StrLit&) { e.type = string_type(); return true; }

            bool operator()(EnumLit& n) {
                const model::EnumDecl* decl =
                    c.env_.model ? c.env_.model->enumeration(n.enum_name) : nullptr;
                if (!decl) {
                    return c.fail(e, Code::ResolutionError, "unknown enum '" + n.enum_name + "'");
                }
                if (!decl->has_literal(n.literal)) {
                    return c.fail(e, Code::ResolutionError,
                                  "enum '" + n.enum_name + "' has no literal '" + n.literal + "'");
                }
                e.type = enum_type(n.enum_name);
                return true;
            }

            bool operator()(VarRef& n) {
                if (const StaticType* t = c.lookup(n.name)) {
                    e.type = *t;
                    return true;
                }
                if (c.env_.model && c.env_.model->entity(n.name)) {
                    return c.fail(e, Code::ScopeError,
                                  "entity '" + n.name +
                                      "' used as a variable; did you mean '" + n.name +
                                      ".allInstances()'?");
                }
                return c.fail(e, Code::ScopeError, "unknown variable '" + n.name + "'");
            }

            bool operator()(Nav& n) {
                if (!c.check_expr(*n.source)) return false;
                if (n.at_pre && c.ctx_ != ExprContext::Postcondition) {
                    return c.fail(e, Code::ScopeError, "@pre is only allowed in postconditions");
                }
                const StaticType& st = n.source->type;
                if (st.kind == Kind::Set) {
                    return c.fail(e, Code::TypeError,
                                  "navigation over a set; use ->any/->select first");
                }
                if (st.kind != Kind::Object) {
                    return c.fail(e, Code::TypeError,
                                  "navigation from non-object type " + render_type(st));
                }
                const model::EntityDecl* entity = c.env_.model->entity(st.name);
                if (!entity) {
                    return c.fail(e, Code::ResolutionError, "unknown entity '" + st.name + "'");
                }
                if (const model::AttributeDecl* attr = entity->attribute(n.member)) {
                    n.is_assoc = false;
                    n.owner_entity = entity->name;
                    e.type = attr->type;
                    return true;
                }
                if (const model::AssociationEnd* end = entity->end(n.member)) {
                    n.is_assoc = true;
                    n.mult = end->mult;
                    n.owner_entity = entity->name;
                    e.type = end->mult == Mult::One ? object_type(end->target)
                                                    : set_type(end->target);
                    return true;
                }
                return c.fail(e, Code::ResolutionError,
                              "entity '" + entity->name + "' has no attribute or association '" +
                                  n.member + "'");
            }

            bool operator()(AllInstances& n) {
                if (!c.env_.model || !c.env_.model->entity(n.entity)) {
                    return c.fail(e, Code::ResolutionError, "unknown entity '" + n.entity + "'");
                }
                e.type = set_type(n.entity);
                return true;
            }

            bool operator()(Iter& n) {
                if (!c.check_expr(*n.source)) return false;
                if (n.source->type.kind != Kind::Set) {
                    return c.fail(e, Code::TypeError,
                                  "iterator source must be a set, found " +
                                      render_type(n.source->type));
                }
                c.scope_.emplace_back(n.var, object_type(n.source->type.name));
                bool ok = c.check_bool_operand(*n.body);
                c.scope_.pop_back();
                if (!ok) return false;
                e.type = n.kind == IterKind::Any ? object_type(n.source->type.name)
                                                 : set_type(n.source->type.name);
                return true;
            }

            bool operator()(CollectionOp& n) {
                if (!c.check_expr(*n.source)) return false;
                if (n.source->type.kind != Kind::Set) {
                    return c.fail(e, Code::TypeError,
                                  "collection operation on non-set type " +
                                      render_type(n.source->type));
                }
                const std::string& elem = n.source->type.name;
                switch (n.op) {
                    case CollOp::Includes:
                    case CollOp::Excludes: {
                        if (!c.check_expr(*n.arg)) return false;
                        if (n.arg->type != object_type(elem)) {
                            return c.fail(e, Code::TypeError,
                                          std::string(coll_op_text(n.op)) + " argument must be " +
                                              elem + ", found " + render_type(n.arg->type));
                        }
                        e.type = boolean_type();
                        return true;
                    }
                    case CollOp::IncludesAll:
                    case CollOp::ExcludesAll: {
                        if (!c.check_expr(*n.arg)) return false;
                        if (n.arg->type != set_type(elem)) {
                            return c.fail(e, Code::TypeError,
                                          std::string(coll_op_text(n.op)) +
                                              " argument must be Set(" + elem + "), found " +
                                              render_type(n.arg->type));
                        }
                        e.type = boolean_type();
                        return true;
                    }
                    case CollOp::Size:
                        e.type = integer_type();
                        return true;
                    case CollOp::IsEmpty:
                    case CollOp::NotEmpty:
                        e.type = boolean_type();
                        return true;
                }
                return false;
            }

            bool operator()(StandardOp& n) {
                if (!c.check_expr(*n.source)) return false;
                if (n.op == StdOp::OclIsNew && c.ctx_ != ExprContext::Postcondition) {
                    return c.fail(e, Code::ScopeError,
                                  "oclIsNew is only allowed in postconditions");
                }
                if (n.source->type.kind != Kind::Object) {
                    return c.fail(e, Code::TypeError,
                                  std::string(std_op_text(n.op)) + " applies to objects, found " +
                                      render_type(n.source->type));
                }
                e.type = boolean_type();
                return true;
            }

            bool operator()(Compare& n) {
                bool lhs_ok = c.check_expr(*n.lhs);
                bool rhs_ok = c.check_expr(*n.rhs);
                if (!lhs_ok || !rhs_ok) return false;
                const StaticType& a = n.lhs->type;
                const StaticType& b = n.rhs->type;
                const bool equality = n.op == CmpOp::Eq || n.op == CmpOp::Ne;
                bool ok = false;
                if (numeric_pair(a.kind, b.kind)) {
                    ok = true;
                } else if (a.kind == Kind::String && b.kind == Kind::String) {
                    ok = true;
                } else if (a.kind == Kind::Boolean && b.kind == Kind::Boolean) {
                    ok = equality;
                } else if (a.kind == Kind::Enum && b.kind == Kind::Enum && a.name == b.name) {
                    ok = equality;
                } else if (a.kind == Kind::Object && b.kind == Kind::Object && a.name == b.name) {
                    ok = equality;
                } else if (a.kind == Kind::Set && b.kind == Kind::Set && a.name == b.name) {
                    ok = equality;
                }
                if (!ok) {
                    return c.fail(e, Code::TypeError,
                                  "cannot compare " + render_type(a) + " " + cmp_op_text(n.op) +
                                      " " + render_type(b));
                }
                e.type = boolean_type();
                return true;
            }

            bool operator()(Arith& n) {
                bool lhs_ok = c.check_expr(*n.lhs);
                bool rhs_ok = c.check_expr(*n.rhs);
                if (!lhs_ok || !rhs_ok) return false;
                Kind a = n.lhs->type.kind;
                Kind b = n.rhs->type.kind;
                if (!numeric_pair(a, b)) {
                    return c.fail(e, Code::TypeError,
                                  "arithmetic on " + render_type(n.lhs->type) + " and " +
                                      render_type(n.rhs->type));
                }
                const bool add_sub = n.op == ArithOp::Add || n.op == ArithOp::Sub;
                if (a == Kind::Date || b == Kind::Date) {
                    if (!add_sub || a == Kind::Real || b == Kind::Real) {
                        return c.fail(e, Code::TypeError,
                                      "Date supports only + and - with Integer or Date");
                    }
                    if (a == Kind::Date && b == Kind::Date) {
                        if (n.op != ArithOp::Sub) {
                            return c.fail(e, Code::TypeError, "Date + Date is not meaningful");
                        }
                        e.type = integer_type();
                    } else {
                        e.type = date_type();
                    }
                    return true;
                }
                e.type = (a == Kind::Real || b == Kind::Real) ? real_type() : integer_type();
                return true;
            }

            bool operator()(BoolBin& n) {
                bool lhs_ok = c.check_bool_operand(*n.lhs);
                bool rhs_ok = c.check_bool_operand(*n.rhs);
                if (!lhs_ok || !rhs_ok) return false;
                e.type = boolean_type();
                return true;
            }

            bool operator()(NotExpr& n) {
                if (!c.check_bool_operand(*n.operand)) return false;
                e.type = boolean_type();
                return true;
            }

            bool operator()(IfExpr& n) {
                bool cond_ok = c.check_bool_operand(*n.cond);
                bool then_ok = c.check_expr(*n.then_branch);
                bool else_ok = c.check_expr(*n.else_branch);
                if (!cond_ok || !then_ok || !else_ok) return false;
                const StaticType& a = n.then_branch->type;
                const StaticType& b = n.else_branch->type;
                if (a == b) {
                    e.type = a;
                } else if ((a.kind == Kind::Integer && b.kind == Kind::Real) ||
                           (a.kind == Kind::Real && b.kind == Kind::Integer)) {
                    e.type = real_type();
                } else if ((a.kind == Kind::Date && b.kind == Kind::Integer) ||
                           (a.kind == Kind::Integer && b.kind == Kind::Date)) {
                    e.type = date_type();
                } else {
                    return c.fail(e, Code::TypeError,
                                  "if branches have incompatible types " + render_type(a) +
                                      " and " + render_type(b));
                }
                return true;
            }

            bool operator()(LetExpr& n) {
                std::size_t pushed = 0;
                bool ok = true;
                for (LetBinding& b : n.bindings) {
                    if (!c.check_expr(*b.value)) {
                        ok = false;
                        break;
                    }
                    c.scope_.emplace_back(b.name, b.value->type);
                    ++pushed;
                }
                if (ok) ok = c.check_expr(*n.body);
                while (pushed--) c.scope_.pop_back();
                if (!ok) return false;
                e.type = n.body->type;
                return true;
            }
        };
        return std::visit(V{*this, e}, e.node);
    }
};

} // namespace

bool type_check(Expr& expr, const TypeEnv& env, ExprContext ctx, Diagnostics& diags) {
    Checker checker(env, ctx, diags);
    return checker.check(expr);
}

} // namespace rmc::ocl
