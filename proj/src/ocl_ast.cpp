#include "rmcodec/ocl_ast.hpp"

#include "rmcodec/value.hpp"

#include <cstdio>
#include <functional>
#include <sstream>

namespace rmc::ocl {

const char* cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "<>";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

const char* arith_op_text(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
    }
    return "?";
}

const char* coll_op_text(CollOp op) {
    switch (op) {
        case CollOp::Includes: return "includes";
        case CollOp::Excludes: return "excludes";
        case CollOp::IncludesAll: return "includesAll";
        case CollOp::ExcludesAll: return "excludesAll";
        case CollOp::Size: return "size";
        case CollOp::IsEmpty: return "isEmpty";
        case CollOp::NotEmpty: return "notEmpty";
    }
    return "?";
}

const char* std_op_text(StdOp op) {
    switch (op) {
        case StdOp::OclIsNew: return "oclIsNew";
        case StdOp::OclIsUndefined: return "oclIsUndefined";
    }
    return "?";
}

ExprPtr make_expr(Span span, Node node) {
    auto e = std::make_unique<Expr>();
    e->span = std::move(span);
    e->node = std::move(node);
    return e;
}

namespace {

template <typename T>
bool both(const Expr& a, const Expr& b, const T*& pa, const T*& pb) {
    pa = std::get_if<T>(&a.node);
    pb = std::get_if<T>(&b.node);
    return pa && pb;
}

} // namespace

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    {
        const BoolLit *x, *y;
        if (both(a, b, x, y)) return x->value == y->value;
    }
    {
        const IntLit *x, *y;
        if (both(a, b, x, y)) return x->value == y->value;
    }
    {
        const RealLit *x, *y;
        if (both(a, b, x, y)) return x->value == y->value;
    }
    {
        const StrLit *x, *y;
        if (both(a, b, x, y)) return x->value == y->value;
    }
    {
        const EnumLit *x, *y;
        if (both(a, b, x, y)) return x->enum_name == y->enum_name && x->literal == y->literal;
    }
    {
        const VarRef *x, *y;
        if (both(a, b, x, y)) return x->name == y->name;
    }
    {
        const Nav *x, *y;
        if (both(a, b, x, y))
            return x->member == y->member && x->at_pre == y->at_pre &&
                   expr_equal(*x->source, *y->source);
    }
    {
        const AllInstances *x, *y;
        if (both(a, b, x, y)) return x->entity == y->entity;
    }
    {
        const Iter *x, *y;
        if (both(a, b, x, y))
            return x->kind == y->kind && x->var == y->var && expr_equal(*x->source, *y->source) &&
                   expr_equal(*x->body, *y->body);
    }
    {
        const CollectionOp *x, *y;
        if (both(a, b, x, y)) {
            if (x->op != y->op || !expr_equal(*x->source, *y->source)) return false;
            if (!x->arg != !y->arg) return false;
            return !x->arg || expr_equal(*x->arg, *y->arg);
        }
    }
    {
        const StandardOp *x, *y;
        if (both(a, b, x, y)) return x->op == y->op && expr_equal(*x->source, *y->source);
    }
    {
        const Compare *x, *y;
        if (both(a, b, x, y))
            return x->op == y->op && expr_equal(*x->lhs, *y->lhs) && expr_equal(*x->rhs, *y->rhs);
    }
    {
        const Arith *x, *y;
        if (both(a, b, x, y))
            return x->op == y->op && expr_equal(*x->lhs, *y->lhs) && expr_equal(*x->rhs, *y->rhs);
    }
    {
        const BoolBin *x, *y;
        if (both(a, b, x, y))
            return x->op == y->op && expr_equal(*x->lhs, *y->lhs) && expr_equal(*x->rhs, *y->rhs);
    }
    {
        const NotExpr *x, *y;
        if (both(a, b, x, y)) return expr_equal(*x->operand, *y->operand);
    }
    {
        const IfExpr *x, *y;
        if (both(a, b, x, y))
            return expr_equal(*x->cond, *y->cond) && expr_equal(*x->then_branch, *y->then_branch) &&
                   expr_equal(*x->else_branch, *y->else_branch);
    }
    {
        const LetExpr *x, *y;
        if (both(a, b, x, y)) {
            if (x->bindings.size() != y->bindings.size()) return false;
            for (std::size_t i = 0; i < x->bindings.size(); ++i) {
                if (x->bindings[i].name != y->bindings[i].name) return false;
                if (!expr_equal(*x->bindings[i].value, *y->bindings[i].value)) return false;
            }
            return expr_equal(*x->body, *y->body);
        }
    }
    return false;
}

ExprPtr clone_expr(const Expr& e) {
    auto out = std::make_unique<Expr>();
    out->span = e.span;
    out->type = e.type;
    struct Cloner {
        Node operator()(const BoolLit& n) const { return n; }
        Node operator()(const IntLit& n) const { return n; }
        Node operator()(const RealLit& n) const { return n; }
        Node operator()(const StrLit& n) const { return n; }
        Node operator()(const EnumLit& n) const { return n; }
        Node operator()(const VarRef& n) const { return n; }
        Node operator()(const Nav& n) const {
            Nav c;
            c.source = clone_expr(*n.source);
            c.member = n.member;
            c.at_pre = n.at_pre;
            c.is_assoc = n.is_assoc;
            c.mult = n.mult;
            c.owner_entity = n.owner_entity;
            return c;
        }
        Node operator()(const AllInstances& n) const { return n; }
        Node operator()(const Iter& n) const {
            Iter c;
            c.kind = n.kind;
            c.source = clone_expr(*n.source);
            c.var = n.var;
            c.body = clone_expr(*n.body);
            return c;
        }
        Node operator()(const CollectionOp& n) const {
            CollectionOp c;
            c.op = n.op;
            c.source = clone_expr(*n.source);
            if (n.arg) c.arg = clone_expr(*n.arg);
            return c;
        }
        Node operator()(const StandardOp& n) const {
            StandardOp c;
            c.op = n.op;
            c.source = clone_expr(*n.source);
            return c;
        }
        Node operator()(const Compare& n) const {
            return Compare{n.op, clone_expr(*n.lhs), clone_expr(*n.rhs)};
        }
        Node operator()(const Arith& n) const {
            return Arith{n.op, clone_expr(*n.lhs), clone_expr(*n.rhs)};
        }
        Node operator()(const BoolBin& n) const {
            return BoolBin{n.op, clone_expr(*n.lhs), clone_expr(*n.rhs)};
        }
        Node operator()(const NotExpr& n) const { return NotExpr{clone_expr(*n.operand)}; }
        Node operator()(const IfExpr& n) const {
            return IfExpr{clone_expr(*n.cond), clone_expr(*n.then_branch),
                          clone_expr(*n.else_branch)};
        }
        Node operator()(const LetExpr& n) const {
            LetExpr c;
            for (const LetBinding& b : n.bindings) {
                c.bindings.push_back(LetBinding{b.name, clone_expr(*b.value), b.span});
            }
            c.body = clone_expr(*n.body);
            return c;
        }
    };
    out->node = std::visit(Cloner{}, e.node);
    return out;
}

namespace {

// Binding strengths used to place the minimum set of parentheses:
// or < and < compare < additive < multiplicative < not < postfix/primary.
// if/let render parenthesized anywhere below the top level.
constexpr int kPrecIfLet = 0;
constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecCompare = 3;
constexpr int kPrecAdd = 4;
constexpr int kPrecMul = 5;
constexpr int kPrecNot = 6;
constexpr int kPrecPostfix = 7;

std::string render_real_literal(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

void render(const Expr& e, int min_prec, std::string& out) {
    struct V {
        const Expr& e;
        int min_prec;
        std::string& out;

        void wrap(int prec, const std::function<void()>& body) const {
            if (prec < min_prec) {
                out += '(';
                body();
                out += ')';
            } else {
                body();
            }
        }

        void operator()(const BoolLit& n) const { out += n.value ? "true" : "false"; }
        void operator()(const IntLit& n) const {
            wrap(n.value < 0 ? kPrecNot : kPrecPostfix,
                 [&] { out += std::to_string(n.value); });
        }
        void operator()(const RealLit& n) const {
            wrap(n.value < 0 ? kPrecNot : kPrecPostfix,
                 [&] { out += render_real_literal(n.value); });
        }
        void operator()(const StrLit& n) const {
            out += '"';
            for (char c : n.value) {
                switch (c) {
                    case '"': out += "\\\""; break;
                    case '\\': out += "\\\\"; break;
                    case '\n': out += "\\n"; break;
                    case '\t': out += "\\t"; break;
                    default: out += c;
                }
            }
            out += '"';
        }
        void operator()(const EnumLit& n) const { out += n.enum_name + "::" + n.literal; }
        void operator()(const VarRef& n) const { out += n.name; }
        void operator()(const Nav& n) const {
            render(*n.source, kPrecPostfix, out);
            out += '.';
            out += n.member;
            if (n.at_pre) out += "@pre";
        }
        void operator()(const AllInstances& n) const { out += n.entity + ".allInstances()"; }
        void operator()(const Iter& n) const {
            render(*n.source, kPrecPostfix, out);
            out += n.kind == IterKind::Any ? "->any(" : "->select(";
            out += n.var;
            out += " | ";
            render(*n.body, 0, out);
            out += ')';
        }
        void operator()(const CollectionOp& n) const {
            render(*n.source, kPrecPostfix, out);
            out += "->";
            out += coll_op_text(n.op);
            out += '(';
            if (n.arg) render(*n.arg, 0, out);
            out += ')';
        }
        void operator()(const StandardOp& n) const {
            render(*n.source, kPrecPostfix, out);
            out += '.';
            out += std_op_text(n.op);
            out += "()";
        }
        void operator()(const Compare& n) const {
            wrap(kPrecCompare, [&] {
                render(*n.lhs, kPrecAdd, out);
                out += ' ';
                out += cmp_op_text(n.op);
                out += ' ';
                render(*n.rhs, kPrecAdd, out);
            });
        }
        void operator()(const Arith& n) const {
            const bool mul = n.op == ArithOp::Mul || n.op == ArithOp::Div;
            const int prec = mul ? kPrecMul : kPrecAdd;
            wrap(prec, [&] {
                render(*n.lhs, prec, out);
                out += ' ';
                out += arith_op_text(n.op);
                out += ' ';
                render(*n.rhs, prec + 1, out);
            });
        }
        void operator()(const BoolBin& n) const {
            const int prec = n.op == BoolKind::And ? kPrecAnd : kPrecOr;
            wrap(prec, [&] {
                render(*n.lhs, prec, out);
                out += n.op == BoolKind::And ? " and " : " or ";
                render(*n.rhs, prec + 1, out);
            });
        }
        void operator()(const NotExpr& n) const {
            wrap(kPrecNot, [&] {
                out += "not ";
                render(*n.operand, kPrecNot, out);
            });
        }
        void operator()(const IfExpr& n) const {
            wrap(kPrecIfLet, [&] {
                out += "if ";
                render(*n.cond, 0, out);
                out += " then ";
                render(*n.then_branch, 0, out);
                out += " else ";
                render(*n.else_branch, 0, out);
                out += " endif";
            });
        }
        void operator()(const LetExpr& n) const {
            wrap(kPrecIfLet, [&] {
                out += "let ";
                for (std::size_t i = 0; i < n.bindings.size(); ++i) {
                    if (i) out += ", ";
                    out += n.bindings[i].name;
                    out += " = ";
                    render(*n.bindings[i].value, 1, out);
                }
                out += " in ";
                render(*n.body, 0, out);
            });
        }
    };
    std::visit(V{e, min_prec, out}, e.node);
}

} // namespace

std::string render_expr(const Expr& e) {
    std::string out;
    render(e, 0, out);
    return out;
}

} // namespace rmc::ocl
