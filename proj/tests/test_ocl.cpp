#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include "rmcodec/ocl_eval.hpp"
#include "rmcodec/ocl_parser.hpp"

#include <array>
#include <thread>

using namespace rmc;
using testutil::corpus_model;

namespace {

ocl::TypeEnv corpus_env(std::map<std::string, StaticType> vars) {
    ocl::TypeEnv env;
    env.model = &corpus_model();
    env.vars = std::move(vars);
    env.vars.emplace("today", date_type());
    return env;
}

ocl::ExprPtr check_parse(const std::string& text, const ocl::TypeEnv& env,
                         ocl::ExprContext ctx = ocl::ExprContext::Precondition) {
    Diagnostics diags;
    auto e = ocl::parse_expression(text, "expr", env, ctx, diags);
    if (!e) FAIL("expression failed: ", text, "\n", diags.to_string());
    return e;
}

// Small fixture store: three users, one with a loan.
rt::EntityStore small_store() {
    rt::EntityStore s(rt::build_schema(corpus_model()));
    for (std::int64_t uid : {5, 7, 9}) {
        std::uint64_t id = s.create("User");
        s.set_attribute(id, "UserID", uid);
        s.set_attribute(id, "Name", std::string("U") + std::to_string(uid));
    }
    for (int i = 0; i < 3; ++i) s.create("Book");
    return s;
}

} // namespace

TEST_CASE("any over allInstances parses to the documented shape") {
    auto env = corpus_env({{"uid", integer_type()}});
    auto e = check_parse("User.allInstances()->any(u | u.UserID = uid)", env);
    const auto* iter = ocl::as<ocl::Iter>(*e);
    REQUIRE(iter != nullptr);
    CHECK(iter->kind == ocl::IterKind::Any);
    CHECK(ocl::as<ocl::AllInstances>(*iter->source) != nullptr);
    const auto* cmp = ocl::as<ocl::Compare>(*iter->body);
    REQUIRE(cmp != nullptr);
    CHECK(cmp->op == ocl::CmpOp::Eq);
    const auto* nav = ocl::as<ocl::Nav>(*cmp->lhs);
    REQUIRE(nav != nullptr);
    CHECK(nav->member == "UserID");
    CHECK(!nav->at_pre);
    CHECK(ocl::as<ocl::VarRef>(*cmp->rhs) != nullptr);
    CHECK(e->type == object_type("User"));
}

TEST_CASE("true literal is Boolean") {
    auto env = corpus_env({});
    auto e = check_parse("true", env);
    CHECK(ocl::as<ocl::BoolLit>(*e) != nullptr);
    CHECK(e->type == boolean_type());
}

TEST_CASE("postcondition update with @pre parses to the documented shape") {
    auto env = corpus_env({{"user", object_type("User")}});
    auto e = check_parse("user.LoanedNumber = user.LoanedNumber@pre + 1", env,
                         ocl::ExprContext::Postcondition);
    const auto* cmp = ocl::as<ocl::Compare>(*e);
    REQUIRE(cmp != nullptr);
    const auto* lhs = ocl::as<ocl::Nav>(*cmp->lhs);
    REQUIRE(lhs != nullptr);
    CHECK(!lhs->at_pre);
    const auto* arith = ocl::as<ocl::Arith>(*cmp->rhs);
    REQUIRE(arith != nullptr);
    CHECK(arith->op == ocl::ArithOp::Add);
    const auto* pre_nav = ocl::as<ocl::Nav>(*arith->lhs);
    REQUIRE(pre_nav != nullptr);
    CHECK(pre_nav->at_pre);
}

TEST_CASE("enum literal comparison parses") {
    auto env = corpus_env({{"copy", object_type("BookCopy")}});
    auto e = check_parse("copy.Status = CopyStatus::LOANED", env);
    const auto* cmp = ocl::as<ocl::Compare>(*e);
    REQUIRE(cmp != nullptr);
    const auto* lit = ocl::as<ocl::EnumLit>(*cmp->rhs);
    REQUIRE(lit != nullptr);
    CHECK(lit->enum_name == "CopyStatus");
    CHECK(lit->literal == "LOANED");
}

TEST_CASE("operator precedence: arithmetic over comparison over and/or") {
    auto env = corpus_env({{"a", integer_type()}, {"b", integer_type()}, {"p", boolean_type()}});
    auto e = check_parse("a + 2 * b < 10 and p or a = b", env);
    // ((a + (2*b) < 10) and p) or (a = b)
    const auto* top = ocl::as<ocl::BoolBin>(*e);
    REQUIRE(top != nullptr);
    CHECK(top->op == ocl::BoolKind::Or);
    const auto* lhs = ocl::as<ocl::BoolBin>(*top->lhs);
    REQUIRE(lhs != nullptr);
    CHECK(lhs->op == ocl::BoolKind::And);
    const auto* cmp = ocl::as<ocl::Compare>(*lhs->lhs);
    REQUIRE(cmp != nullptr);
    const auto* add = ocl::as<ocl::Arith>(*cmp->lhs);
    REQUIRE(add != nullptr);
    CHECK(add->op == ocl::ArithOp::Add);
    CHECK(ocl::as<ocl::Arith>(*add->rhs)->op == ocl::ArithOp::Mul);
}

TEST_CASE("render and reparse is structurally stable") {
    auto env = corpus_env({{"user", object_type("User")}, {"uid", integer_type()}});
    const char* exprs[] = {
        "User.allInstances()->any(u | u.UserID = uid and u.LoanedNumber < 40)",
        "user.LoanedNumber < (if user.Level = Level::BACHELOR then 20 else 60 endif)",
        "(user.OverDueFee + 1.5) * 2.0 >= 3.0",
        "not (user.Status = UserStatus::NORMAL) or user.LoanedNumber = 0",
        "let limit = 40 in user.LoanedNumber < limit",
    };
    for (const char* text : exprs) {
        Diagnostics diags;
        auto e = ocl::parse_expression_syntax(text, "expr", diags);
        REQUIRE(e != nullptr);
        std::string rendered = ocl::render_expr(*e);
        auto back = ocl::parse_expression_syntax(rendered, "expr2", diags);
        REQUIRE(back != nullptr);
        CHECK(ocl::expr_equal(*e, *back));
    }
}

TEST_CASE("@pre outside a postcondition is a ScopeError") {
    auto env = corpus_env({{"user", object_type("User")}});
    Diagnostics diags;
    auto e = ocl::parse_expression("user.LoanedNumber@pre = 1", "expr", env,
                                   ocl::ExprContext::Precondition, diags);
    CHECK(e == nullptr);
    bool found = false;
    for (const auto& d : diags.items()) found |= d.code == Code::ScopeError;
    CHECK(found);
}

TEST_CASE("only the canonical collection-operation spellings are accepted") {
    Diagnostics diags;
    // include/exclude without the trailing s are not part of the subset
    CHECK(ocl::parse_expression_syntax("s->include(x)", "expr", diags) == nullptr);
    CHECK(ocl::parse_expression_syntax("s->exclude(x)", "expr", diags) == nullptr);
    CHECK(ocl::parse_expression_syntax("s->includeAll(x)", "expr", diags) == nullptr);
    Diagnostics ok_diags;
    CHECK(ocl::parse_expression_syntax("s->includes(x)", "expr", ok_diags) != nullptr);
    CHECK(ocl::parse_expression_syntax("s->excludesAll(x)", "expr", ok_diags) != nullptr);
}

TEST_CASE("type errors are reported") {
    auto env = corpus_env({{"user", object_type("User")}});
    Diagnostics diags;
    CHECK(ocl::parse_expression("user.Name < 5", "expr", env, ocl::ExprContext::Precondition,
                                diags) == nullptr);
    CHECK(ocl::parse_expression("unknownVar = 1", "expr", env, ocl::ExprContext::Precondition,
                                diags) == nullptr);
    CHECK(ocl::parse_expression("user.Nope = 1", "expr", env, ocl::ExprContext::Precondition,
                                diags) == nullptr);
}

// ------------------------------------------------------------- evaluation ---

TEST_CASE("allInstances size counts the extent") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({});
    auto e = check_parse("Book.allInstances()->size()", env);
    Value v = ocl::evaluate(*e, s, s, {});
    CHECK(v == Value{std::int64_t{3}});
}

TEST_CASE("oclIsUndefined on an undefined binding") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({{"u", object_type("User")}});
    auto e = check_parse("u.oclIsUndefined()", env);
    ocl::Bindings b{{"u", Undefined{}}};
    CHECK(ocl::evaluate(*e, s, s, b) == Value{true});
}

TEST_CASE("any picks the first matching object in insertion order") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({});
    auto e = check_parse("User.allInstances()->any(u | u.UserID > 5)", env);
    Value v = ocl::evaluate(*e, s, s, {});
    // users were created with ids 1,2,3 for UserIDs 5,7,9; first match is UserID 7
    const ObjectRef* ref = std::get_if<ObjectRef>(&v);
    REQUIRE(ref != nullptr);
    CHECK(s.attribute_of(ref->id, "UserID") == Value{std::int64_t{7}});
}

TEST_CASE("any with no match is undefined") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({});
    auto e = check_parse("User.allInstances()->any(u | u.UserID = 1234)", env);
    CHECK(is_undefined(ocl::evaluate(*e, s, s, {})));
}

// Hand-evaluated borrowBook precondition, clause by clause:
//   user is defined (bound), copy is defined (bound)            -> true
//   user.Status = NORMAL                                        -> true
//   user.LoanedNumber(39) < limit(MASTER -> 40)                 -> true
//   reserve undefined, so the reserved disjunct is false, but
//   copy.Status = AVAILABLE                                     -> true
// Conjunction of all clauses                                    -> true
TEST_CASE("borrowBook precondition evaluates true on the narrative store") {
    rt::EntityStore s(rt::build_schema(corpus_model()));
    std::uint64_t user = s.create("User");
    s.set_attribute(user, "UserID", std::int64_t{1});
    s.set_attribute(user, "Level", EnumValue{"Level", "MASTER"});
    s.set_attribute(user, "Status", EnumValue{"UserStatus", "NORMAL"});
    s.set_attribute(user, "LoanedNumber", std::int64_t{39});
    std::uint64_t copy = s.create("BookCopy");
    s.set_attribute(copy, "BarCode", std::string("BC-1"));
    s.set_attribute(copy, "Status", EnumValue{"CopyStatus", "AVAILABLE"});

    const model::ContractDecl* contract = corpus_model().contract_for("borrowBook");
    REQUIRE(contract != nullptr);
    ocl::Bindings b{{"user", ObjectRef{user}},
                    {"copy", ObjectRef{copy}},
                    {"reserve", Undefined{}},
                    {"uid", std::int64_t{1}},
                    {"barcode", std::string("BC-1")},
                    {"today", std::int64_t{1000}}};
    CHECK(ocl::evaluate(*contract->precondition, s, s, b) == Value{true});

    // at the limit the same precondition is false
    s.set_attribute(user, "LoanedNumber", std::int64_t{40});
    CHECK(ocl::evaluate(*contract->precondition, s, s, b) == Value{false});
}

TEST_CASE("evaluation never mutates the store") {
    rt::EntityStore s = small_store();
    rt::EntityStore before = s;
    auto env = corpus_env({});
    auto e = check_parse("User.allInstances()->select(u | u.UserID > 0)->size() = 3", env);
    ocl::evaluate(*e, s, s, {});
    CHECK(s == before);
}

TEST_CASE("pre and post context agree for @pre-free expressions") {
    rt::EntityStore s = small_store();
    rt::EntityStore other = s;
    std::uint64_t extra = other.create("Book");
    (void)extra;
    auto env = corpus_env({});
    auto e = check_parse("User.allInstances()->size()", env);
    // expression without @pre/oclIsNew reads only the post store
    CHECK(ocl::evaluate(*e, s, s, {}) == ocl::evaluate(*e, other, s, {}));
}

TEST_CASE("and short-circuits: false left side skips the right") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({{"u", object_type("User")}});
    auto e = check_parse("u.oclIsUndefined() = false and u.UserID = 5", env);
    ocl::Bindings b{{"u", Undefined{}}};
    int right_evals = 0;
    ocl::EvalHooks hooks;
    hooks.on_eval = [&](const ocl::Expr& node) {
        const auto* nav = ocl::as<ocl::Nav>(node);
        if (nav && nav->member == "UserID") ++right_evals;
    };
    CHECK(ocl::evaluate(*e, s, s, b, &hooks) == Value{false});
    CHECK(right_evals == 0);

    // with a defined user, the right side is evaluated
    ocl::Bindings b2{{"u", ObjectRef{1}}};
    CHECK(ocl::evaluate(*e, s, s, b2, &hooks) == Value{true});
    CHECK(right_evals == 1);
}

TEST_CASE("undefined propagates through navigation chains") {
    rt::EntityStore s(rt::build_schema(corpus_model()));
    auto env = corpus_env({{"loan", object_type("Loan")}});
    ocl::Bindings b{{"loan", Undefined{}}};
    // chains of length 1 and 2 from an undefined root
    auto e1 = check_parse("loan.DueDate", env, ocl::ExprContext::Definition);
    CHECK(is_undefined(ocl::evaluate(*e1, s, s, b)));
    auto e2 = check_parse("loan.LoanedUser.Name", env, ocl::ExprContext::Definition);
    CHECK(is_undefined(ocl::evaluate(*e2, s, s, b)));
    // comparison with the undefined chain is false
    auto e3 = check_parse("loan.LoanedUser.Name = \"x\"", env);
    CHECK(ocl::evaluate(*e3, s, s, b) == Value{false});
}

TEST_CASE("division by zero raises EvalError") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({{"a", integer_type()}});
    auto e = check_parse("1 / a = 1", env);
    ocl::Bindings b{{"a", std::int64_t{0}}};
    CHECK_THROWS_AS(ocl::evaluate(*e, s, s, b), ocl::EvalError);
}

TEST_CASE("two-state: @pre reads the snapshot, oclIsNew compares states") {
    rt::EntityStore pre(rt::build_schema(corpus_model()));
    std::uint64_t user = pre.create("User");
    pre.set_attribute(user, "LoanedNumber", std::int64_t{3});
    rt::EntityStore post = pre;
    post.set_attribute(user, "LoanedNumber", std::int64_t{4});
    std::uint64_t loan = post.create("Loan");

    auto env = corpus_env({{"user", object_type("User")}, {"loan", object_type("Loan")}});
    ocl::Bindings b{{"user", ObjectRef{user}}, {"loan", ObjectRef{loan}}};

    auto update = check_parse("user.LoanedNumber = user.LoanedNumber@pre + 1", env,
                              ocl::ExprContext::Postcondition);
    CHECK(ocl::evaluate(*update, pre, post, b) == Value{true});

    auto fresh = check_parse("loan.oclIsNew()", env, ocl::ExprContext::Postcondition);
    CHECK(ocl::evaluate(*fresh, pre, post, b) == Value{true});
    CHECK(ocl::evaluate(*fresh, post, post, b) == Value{false});
}

TEST_CASE("let binds values for the body") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({});
    auto e = check_parse("let n = Book.allInstances()->size() in n + 1 = 4", env);
    CHECK(ocl::evaluate(*e, s, s, {}) == Value{true});
}

TEST_CASE("evaluator is reentrant across threads on a shared snapshot") {
    rt::EntityStore s = small_store();
    auto env = corpus_env({});
    auto e = check_parse("User.allInstances()->select(u | u.UserID > 4)->size()", env);
    std::vector<std::thread> threads;
    std::array<Value, 8> results;
    for (std::size_t i = 0; i < results.size(); ++i) {
        threads.emplace_back([&, i] { results[i] = ocl::evaluate(*e, s, s, {}); });
    }
    for (std::thread& t : threads) t.join();
    for (const Value& v : results) CHECK(v == Value{std::int64_t{3}});
}

TEST_CASE("released object reads as undefined through oclIsUndefined") {
    rt::EntityStore pre(rt::build_schema(corpus_model()));
    std::uint64_t user = pre.create("User");
    rt::EntityStore post = pre;
    post.release(user);
    auto env = corpus_env({{"user", object_type("User")}});
    ocl::Bindings b{{"user", ObjectRef{user}}};
    auto e = check_parse("user.oclIsUndefined() = true", env, ocl::ExprContext::Postcondition);
    CHECK(ocl::evaluate(*e, pre, post, b) == Value{true});
}
