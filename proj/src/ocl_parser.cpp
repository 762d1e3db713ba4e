#include "rmcodec/ocl_parser.hpp"

#include <cassert>

namespace rmc::ocl {

namespace {

class ExprParser {
public:
    ExprParser(const std::vector<Token>& toks, std::size_t& pos, Diagnostics& diags)
        : toks_(toks), pos_(pos), diags_(diags) {}

    ExprPtr parse() { return parse_or(); }

private:
    const std::vector<Token>& toks_;
    std::size_t& pos_;
    Diagnostics& diags_;

    const Token& peek() const { return toks_[pos_]; }
    const Token& peek2() const {
        return pos_ + 1 < toks_.size() ? toks_[pos_ + 1] : toks_.back();
    }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        take();
        return true;
    }
    bool expect(Tok k, const char* where) {
        if (accept(k)) return true;
        error(std::string("expected ") + token_name(k) + " " + where + ", found " +
              token_name(peek().kind));
        return false;
    }
    void error(const std::string& msg) { diags_.add(Code::SyntaxError, peek().span, msg); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        if (!lhs) return nullptr;
        while (at(Tok::KwOr)) {
            Span sp = take().span;
            ExprPtr rhs = parse_and();
            if (!rhs) return nullptr;
            lhs = make_expr(sp, BoolBin{BoolKind::Or, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_compare();
        if (!lhs) return nullptr;
        while (at(Tok::KwAnd)) {
            Span sp = take().span;
            ExprPtr rhs = parse_compare();
            if (!rhs) return nullptr;
            lhs = make_expr(sp, BoolBin{BoolKind::And, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    // Comparison is non-associative: a = b = c is a syntax error.
    ExprPtr parse_compare() {
        ExprPtr lhs = parse_additive();
        if (!lhs) return nullptr;
        CmpOp op;
        if (!peek_cmp(op)) return lhs;
        Span sp = take().span;
        ExprPtr rhs = parse_additive();
        if (!rhs) return nullptr;
        CmpOp chained;
        if (peek_cmp(chained)) {
            error("chained comparison; parenthesize to disambiguate");
            return nullptr;
        }
        return make_expr(sp, Compare{op, std::move(lhs), std::move(rhs)});
    }

    bool peek_cmp(CmpOp& op) const {
        switch (peek().kind) {
            case Tok::Eq: op = CmpOp::Eq; return true;
            case Tok::Ne: op = CmpOp::Ne; return true;
            case Tok::Lt: op = CmpOp::Lt; return true;
            case Tok::Le: op = CmpOp::Le; return true;
            case Tok::Gt: op = CmpOp::Gt; return true;
            case Tok::Ge: op = CmpOp::Ge; return true;
            default: return false;
        }
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        if (!lhs) return nullptr;
        while (at(Tok::Plus) || at(Tok::Minus)) {
            ArithOp op = at(Tok::Plus) ? ArithOp::Add : ArithOp::Sub;
            Span sp = take().span;
            ExprPtr rhs = parse_multiplicative();
            if (!rhs) return nullptr;
            lhs = make_expr(sp, Arith{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        if (!lhs) return nullptr;
        while (at(Tok::Star) || at(Tok::Slash)) {
            ArithOp op = at(Tok::Star) ? ArithOp::Mul : ArithOp::Div;
            Span sp = take().span;
            ExprPtr rhs = parse_unary();
            if (!rhs) return nullptr;
            lhs = make_expr(sp, Arith{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::KwNot)) {
            Span sp = take().span;
            ExprPtr operand = parse_unary();
            if (!operand) return nullptr;
            return make_expr(sp, NotExpr{std::move(operand)});
        }
        if (at(Tok::Minus)) {
            // Unary minus folds into numeric literals only.
            Span sp = take().span;
            if (at(Tok::Integer)) {
                Token t = take();
                return make_expr(sp, IntLit{-t.int_val});
            }
            if (at(Tok::Real)) {
                Token t = take();
                return make_expr(sp, RealLit{-t.real_val});
            }
            error("'-' is only supported on numeric literals; write 0 - x instead");
            return nullptr;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        if (!e) return nullptr;
        for (;;) {
            if (at(Tok::Dot)) {
                Span sp = take().span;
                if (!at(Tok::Identifier)) {
                    error("expected member name after '.'");
                    return nullptr;
                }
                Token member = take();
                if (accept(Tok::LParen)) {
                    if (!expect(Tok::RParen, "after '()' call")) return nullptr;
                    if (member.text == "allInstances") {
                        const VarRef* v = as<VarRef>(*e);
                        if (!v) {
                            diags_.add(Code::SyntaxError, sp,
                                       "allInstances() applies to an entity name");
                            return nullptr;
                        }
                        e = make_expr(sp, AllInstances{v->name});
                    } else if (member.text == "oclIsNew") {
                        e = make_expr(sp, StandardOp{StdOp::OclIsNew, std::move(e)});
                    } else if (member.text == "oclIsUndefined") {
                        e = make_expr(sp, StandardOp{StdOp::OclIsUndefined, std::move(e)});
                    } else {
                        diags_.add(Code::SyntaxError, sp,
                                   "unknown standard operation '" + member.text + "'");
                        return nullptr;
                    }
                } else {
                    Nav nav;
                    nav.source = std::move(e);
                    nav.member = member.text;
                    nav.at_pre = accept(Tok::AtPre);
                    e = make_expr(sp, std::move(nav));
                }
                continue;
            }
            if (at(Tok::Arrow)) {
                Span sp = take().span;
                if (!at(Tok::Identifier)) {
                    error("expected collection operation after '->'");
                    return nullptr;
                }
                Token op = take();
                if (!expect(Tok::LParen, "after collection operation")) return nullptr;
                if (op.text == "any" || op.text == "select") {
                    if (!at(Tok::Identifier)) {
                        error("expected iterator variable");
                        return nullptr;
                    }
                    Token var = take();
                    if (!expect(Tok::Bar, "after iterator variable")) return nullptr;
                    ExprPtr body = parse_or();
                    if (!body) return nullptr;
                    if (!expect(Tok::RParen, "to close iterator")) return nullptr;
                    Iter iter;
                    iter.kind = op.text == "any" ? IterKind::Any : IterKind::Select;
                    iter.source = std::move(e);
                    iter.var = var.text;
                    iter.body = std::move(body);
                    e = make_expr(sp, std::move(iter));
                    continue;
                }
                CollOp coll;
                bool needs_arg = false;
                if (op.text == "includes") { coll = CollOp::Includes; needs_arg = true; }
                else if (op.text == "excludes") { coll = CollOp::Excludes; needs_arg = true; }
                else if (op.text == "includesAll") { coll = CollOp::IncludesAll; needs_arg = true; }
                else if (op.text == "excludesAll") { coll = CollOp::ExcludesAll; needs_arg = true; }
                else if (op.text == "size") { coll = CollOp::Size; }
                else if (op.text == "isEmpty") { coll = CollOp::IsEmpty; }
                else if (op.text == "notEmpty") { coll = CollOp::NotEmpty; }
                else {
                    diags_.add(Code::SyntaxError, sp,
                               "unknown collection operation '" + op.text + "'");
                    return nullptr;
                }
                CollectionOp node;
                node.op = coll;
                node.source = std::move(e);
                if (needs_arg) {
                    node.arg = parse_or();
                    if (!node.arg) return nullptr;
                }
                if (!expect(Tok::RParen, "to close collection operation")) return nullptr;
                e = make_expr(sp, std::move(node));
                continue;
            }
            break;
        }
        return e;
    }

    ExprPtr parse_primary() {
        Span sp = peek().span;
        switch (peek().kind) {
            case Tok::KwTrue: take(); return make_expr(sp, BoolLit{true});
            case Tok::KwFalse: take(); return make_expr(sp, BoolLit{false});
            case Tok::Integer: return make_expr(sp, IntLit{take().int_val});
            case Tok::Real: return make_expr(sp, RealLit{take().real_val});
            case Tok::String: return make_expr(sp, StrLit{take().text});
            case Tok::LParen: {
                take();
                ExprPtr inner = parse_or();
                if (!inner) return nullptr;
                if (!expect(Tok::RParen, "to close parenthesized expression")) return nullptr;
                return inner;
            }
            case Tok::KwIf: {
                take();
                ExprPtr cond = parse_or();
                if (!cond) return nullptr;
                if (!expect(Tok::KwThen, "in if expression")) return nullptr;
                ExprPtr then_branch = parse_or();
                if (!then_branch) return nullptr;
                if (!expect(Tok::KwElse, "in if expression")) return nullptr;
                ExprPtr else_branch = parse_or();
                if (!else_branch) return nullptr;
                if (!expect(Tok::KwEndif, "to close if expression")) return nullptr;
                return make_expr(sp, IfExpr{std::move(cond), std::move(then_branch),
                                            std::move(else_branch)});
            }
            case Tok::KwLet: {
                take();
                LetExpr let;
                do {
                    if (!at(Tok::Identifier)) {
                        error("expected binding name in let");
                        return nullptr;
                    }
                    Token name = take();
                    if (!expect(Tok::Eq, "after let binding name")) return nullptr;
                    ExprPtr value = parse_or();
                    if (!value) return nullptr;
                    let.bindings.push_back(LetBinding{name.text, std::move(value), name.span});
                } while (accept(Tok::Comma));
                if (!expect(Tok::KwIn, "in let expression")) return nullptr;
                let.body = parse_or();
                if (!let.body) return nullptr;
                return make_expr(sp, std::move(let));
            }
            case Tok::Identifier: {
                Token name = take();
                if (at(Tok::ColonColon)) {
                    take();
                    if (!at(Tok::Identifier)) {
                        error("expected enum literal after '::'");
                        return nullptr;
                    }
                    Token lit = take();
                    return make_expr(sp, EnumLit{name.text, lit.text});
                }
                return make_expr(sp, VarRef{name.text});
            }
            default:
                error(std::string("expected expression, found ") + token_name(peek().kind));
                return nullptr;
        }
    }
};

} // namespace

ExprPtr parse_expression_tokens(const std::vector<Token>& tokens, std::size_t& pos,
                                Diagnostics& diags) {
    ExprParser parser(tokens, pos, diags);
    return parser.parse();
}

ExprPtr parse_expression_syntax(std::string_view source, const std::string& origin,
                                Diagnostics& diags) {
    std::vector<Token> toks = lex(source, origin, diags);
    if (diags.has_errors()) return nullptr;
    std::size_t pos = 0;
    ExprPtr e = parse_expression_tokens(toks, pos, diags);
    if (!e) return nullptr;
    if (toks[pos].kind != Tok::End) {
        diags.add(Code::SyntaxError, toks[pos].span,
                  std::string("trailing input after expression: ") + token_name(toks[pos].kind));
        return nullptr;
    }
    return e;
}

ExprPtr parse_expression(std::string_view source, const std::string& origin, const TypeEnv& env,
                         ExprContext ctx, Diagnostics& diags) {
    ExprPtr e = parse_expression_syntax(source, origin, diags);
    if (!e) return nullptr;
    if (!type_check(*e, env, ctx, diags)) return nullptr;
    return e;
}

const StaticType* TypeEnv::lookup(const std::string& name) const {
    auto it = vars.find(name);
    return it == vars.end() ? nullptr : &it->second;
}

} // namespace rmc::ocl
