#pragma once

#include "rmcodec/diagnostics.hpp"
#include "rmcodec/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rmc::ocl {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div };
enum class BoolKind { And, Or };
enum class IterKind { Any, Select };
enum class CollOp { Includes, Excludes, IncludesAll, ExcludesAll, Size, IsEmpty, NotEmpty };
enum class StdOp { OclIsNew, OclIsUndefined };

const char* cmp_op_text(CmpOp op);
const char* arith_op_text(ArithOp op);
const char* coll_op_text(CollOp op);
const char* std_op_text(StdOp op);

struct BoolLit { bool value = false; };
struct IntLit { std::int64_t value = 0; };
struct RealLit { double value = 0.0; };
struct StrLit { std::string value; };
struct EnumLit { std::string enum_name; std::string literal; };
struct VarRef { std::string name; };

// Attribute or association navigation; `is_assoc`, `mult` and `owner_entity`
// are filled in by the type checker.
struct Nav {
    ExprPtr source;
    std::string member;
    bool at_pre = false;
    bool is_assoc = false;
    Mult mult = Mult::One;
    std::string owner_entity;
};

struct AllInstances { std::string entity; };

struct Iter {
    IterKind kind = IterKind::Any;
    ExprPtr source;
    std::string var;
    ExprPtr body;
};

struct CollectionOp {
    CollOp op = CollOp::Size;
    ExprPtr source;
    ExprPtr arg; // null for size/isEmpty/notEmpty
};

struct StandardOp {
    StdOp op = StdOp::OclIsUndefined;
    ExprPtr source;
};

struct Compare { CmpOp op; ExprPtr lhs; ExprPtr rhs; };
struct Arith { ArithOp op; ExprPtr lhs; ExprPtr rhs; };
struct BoolBin { BoolKind op; ExprPtr lhs; ExprPtr rhs; };
struct NotExpr { ExprPtr operand; };
struct IfExpr { ExprPtr cond; ExprPtr then_branch; ExprPtr else_branch; };

struct LetBinding {
    std::string name;
    ExprPtr value;
    Span span;
};

struct LetExpr {
    std::vector<LetBinding> bindings;
    ExprPtr body;
};

using Node = std::variant<BoolLit, IntLit, RealLit, StrLit, EnumLit, VarRef, Nav,
                          AllInstances, Iter, CollectionOp, StandardOp, Compare,
                          Arith, BoolBin, NotExpr, IfExpr, LetExpr>;

struct Expr {
    Span span;
    StaticType type; // annotated by the checker
    Node node;
};

template <typename T>
const T* as(const Expr& e) {
    return std::get_if<T>(&e.node);
}

ExprPtr make_expr(Span span, Node node);

// Structural equality, ignoring spans and type annotations.
bool expr_equal(const Expr& a, const Expr& b);

// Deep copy (spans and annotations included).
ExprPtr clone_expr(const Expr& e);

// Source-shaped rendering with minimal parentheses; reparses to an equal tree.
std::string render_expr(const Expr& e);

} // namespace rmc::ocl
