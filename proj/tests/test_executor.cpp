#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include "rmcodec/executor.hpp"

using namespace rmc;
using testutil::corpus_app;
using testutil::corpus_model;

namespace {

rt::SchemaPtr corpus_schema() {
    static rt::SchemaPtr schema = rt::build_schema(corpus_model());
    return schema;
}

struct BorrowScene {
    rt::EntityStore store{corpus_schema()};
    std::uint64_t user = 0;
    std::uint64_t copy = 0;
    std::uint64_t reserve = 0;
};

// user with the given level/loan count plus one copy; optionally an open
// reservation for that user on that copy (copy then sits on the hold shelf)
BorrowScene borrow_scene(const char* level, std::int64_t loaned, const char* user_status,
                         const char* copy_status, bool with_reservation) {
    BorrowScene scene;
    rt::EntityStore& s = scene.store;
    scene.user = s.create("User");
    s.set_attribute(scene.user, "UserID", std::int64_t{1});
    s.set_attribute(scene.user, "Name", std::string("Alice"));
    s.set_attribute(scene.user, "Level", EnumValue{"Level", level});
    s.set_attribute(scene.user, "Status", EnumValue{"UserStatus", user_status});
    s.set_attribute(scene.user, "LoanedNumber", loaned);
    scene.copy = s.create("BookCopy");
    s.set_attribute(scene.copy, "BarCode", std::string("BC-1"));
    s.set_attribute(scene.copy, "Status", EnumValue{"CopyStatus", copy_status});
    s.set_attribute(scene.copy, "IsReserved", with_reservation);
    if (with_reservation) {
        scene.reserve = s.create("Reserve");
        s.set_attribute(scene.reserve, "ReserveDate", std::int64_t{990});
        s.set_attribute(scene.reserve, "IsReservedClosed", false);
        s.set_one_link(scene.reserve, "ReservedUser", scene.user);
        s.set_one_link(scene.reserve, "ReservedCopy", scene.copy);
    }
    return scene;
}

rt::ExecutionResult run_borrow(rt::EntityStore& store, std::int64_t uid,
                               const std::string& barcode, std::int64_t today = 1000) {
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("borrowBook");
    REQUIRE(unit != nullptr);
    ocl::Bindings inputs{{"uid", uid}, {"barcode", barcode}};
    return rt::execute(*unit, store, inputs, rt::ExecContext{today});
}

} // namespace

TEST_CASE("borrowBook: direct borrow of an available copy succeeds") {
    BorrowScene scene = borrow_scene("MASTER", 39, "NORMAL", "AVAILABLE", false);
    rt::EntityStore reference = scene.store;

    rt::ExecutionResult r = run_borrow(scene.store, 1, "BC-1");
    REQUIRE(r.ok());
    CHECK(r.success()->result == Value{true});

    // reference route: transcription of the generated listing
    REQUIRE(testutil::reference_borrow_book(reference, 1, "BC-1", 1000));
    CHECK(scene.store == reference);

    // narrative post-state: one new loan linked both ways, counters updated
    CHECK(scene.store.extent("Loan").size() == 1);
    std::uint64_t loan = scene.store.extent("Loan")[0].id;
    CHECK(scene.store.link_of(loan, "LoanedUser") == Value{ObjectRef{scene.user}});
    CHECK(scene.store.link_of(loan, "LoanedCopy") == Value{ObjectRef{scene.copy}});
    CHECK(scene.store.link_of(scene.user, "LoanedBooks") == Value{ObjectSet{ObjectRef{loan}}});
    CHECK(scene.store.link_of(scene.copy, "LoanedRecords") == Value{ObjectSet{ObjectRef{loan}}});
    CHECK(scene.store.attribute_of(scene.user, "LoanedNumber") == Value{std::int64_t{40}});
    CHECK(scene.store.attribute_of(scene.copy, "Status") ==
          Value{EnumValue{"CopyStatus", "LOANED"}});
    CHECK(scene.store.attribute_of(loan, "LoanDate") == Value{std::int64_t{1000}});
    CHECK(scene.store.attribute_of(loan, "DueDate") == Value{std::int64_t{1030}});
}

TEST_CASE("borrowBook: borrowing a copy reserved by the same user closes the reservation") {
    BorrowScene scene = borrow_scene("BACHELOR", 0, "NORMAL", "RESERVED", true);
    rt::EntityStore reference = scene.store;

    rt::ExecutionResult r = run_borrow(scene.store, 1, "BC-1");
    REQUIRE(r.ok());

    REQUIRE(testutil::reference_borrow_book(reference, 1, "BC-1", 1000));
    CHECK(scene.store == reference);

    CHECK(scene.store.attribute_of(scene.reserve, "IsReservedClosed") == Value{true});
    CHECK(scene.store.attribute_of(scene.copy, "IsReserved") == Value{false});
    CHECK(scene.store.attribute_of(scene.copy, "Status") ==
          Value{EnumValue{"CopyStatus", "LOANED"}});
}

TEST_CASE("borrowBook: loan limits are enforced at 20/40/60") {
    const std::pair<const char*, std::int64_t> limits[] = {
        {"BACHELOR", 20}, {"MASTER", 40}, {"PHD", 60}, {"TEACHER", 60}};
    for (const auto& [level, limit] : limits) {
        INFO("level ", level);
        // at the limit: rejected, store untouched, limit clause blamed
        BorrowScene at = borrow_scene(level, limit, "NORMAL", "AVAILABLE", false);
        rt::EntityStore before = at.store;
        rt::ExecutionResult rejected = run_borrow(at.store, 1, "BC-1");
        REQUIRE(!rejected.ok());
        const rt::PreconditionFailure* failure = rejected.precondition_failure();
        REQUIRE(failure != nullptr);
        CHECK(failure->operation == "borrowBook");
        CHECK(failure->clause.rfind("checkAttributeState(user, LoanedNumber, <,", 0) == 0);
        CHECK(at.store == before);

        // reference agrees
        rt::EntityStore ref = before;
        CHECK(!testutil::reference_borrow_book(ref, 1, "BC-1", 1000));
        CHECK(ref == before);

        // one below the limit: accepted
        BorrowScene under = borrow_scene(level, limit - 1, "NORMAL", "AVAILABLE", false);
        rt::EntityStore under_ref = under.store;
        CHECK(run_borrow(under.store, 1, "BC-1").ok());
        REQUIRE(testutil::reference_borrow_book(under_ref, 1, "BC-1", 1000));
        CHECK(under.store == under_ref);
    }
}

TEST_CASE("borrowBook: suspended user is rejected and the store is untouched") {
    BorrowScene scene = borrow_scene("MASTER", 0, "SUSPENDED", "AVAILABLE", false);
    rt::EntityStore before = scene.store;
    rt::ExecutionResult r = run_borrow(scene.store, 1, "BC-1");
    REQUIRE(!r.ok());
    const rt::PreconditionFailure* failure = r.precondition_failure();
    REQUIRE(failure != nullptr);
    CHECK(failure->clause == "checkAttributeState(user, Status, =, UserStatus::NORMAL)");
    CHECK(scene.store == before);

    rt::EntityStore ref = before;
    CHECK(!testutil::reference_borrow_book(ref, 1, "BC-1", 1000));
    CHECK(ref == before);
}

TEST_CASE("teacher due date uses the 60-day holding time") {
    BorrowScene scene = borrow_scene("TEACHER", 0, "NORMAL", "AVAILABLE", false);
    REQUIRE(run_borrow(scene.store, 1, "BC-1").ok());
    std::uint64_t loan = scene.store.extent("Loan")[0].id;
    CHECK(scene.store.attribute_of(loan, "DueDate") == Value{std::int64_t{1060}});
}

TEST_CASE("trivial unit succeeds without touching the store") {
    auto m = testutil::parse_or_throw(R"(
entity User { UserID : Integer }
service S { operation noop }
contract noop() : Boolean {
  precondition: true
  postcondition: true
}
)", "noop.rm");
    Diagnostics diags;
    auto app = logic::generate_application(*m, diags);
    REQUIRE(app != nullptr);
    rt::EntityStore s(app->schema);
    s.create("User");
    rt::EntityStore before = s;
    rt::ExecutionResult r = rt::execute(*app->unit_for("noop"), s, {}, rt::ExecContext{0});
    REQUIRE(r.ok());
    CHECK(r.success()->result == Value{true});
    CHECK(s == before);
}

TEST_CASE("mid-effect fault rolls the store back") {
    auto m = testutil::parse_or_throw(R"(
entity Account { Key : Integer Balance : Integer Divisor : Integer Touched : Boolean }
service S { operation f }
contract f(k : Integer) : Boolean {
  definition: a = Account.allInstances()->any(x | x.Key = k)
  precondition: a.oclIsUndefined() = false
  postcondition:
    a.Touched = true
    and a.Balance = a.Balance@pre / a.Divisor
}
)", "fault.rm");
    Diagnostics diags;
    auto app = logic::generate_application(*m, diags);
    REQUIRE(app != nullptr);
    rt::EntityStore s(app->schema);
    std::uint64_t acct = s.create("Account");
    s.set_attribute(acct, "Key", std::int64_t{1});
    s.set_attribute(acct, "Balance", std::int64_t{10});
    s.set_attribute(acct, "Divisor", std::int64_t{0}); // division by zero mid-effect
    rt::EntityStore before = s;

    rt::ExecutionResult r =
        rt::execute(*app->unit_for("f"), s, {{"k", std::int64_t{1}}}, rt::ExecContext{0});
    REQUIRE(r.fault() != nullptr);
    CHECK(r.fault()->detail.find("division by zero") != std::string::npos);
    // the first update already ran on the working copy; the commit never happened
    CHECK(s == before);
}

TEST_CASE("wrong input arity or type is a runtime fault, store untouched") {
    BorrowScene scene = borrow_scene("MASTER", 0, "NORMAL", "AVAILABLE", false);
    rt::EntityStore before = scene.store;
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("borrowBook");

    rt::ExecutionResult missing =
        rt::execute(*unit, scene.store, {{"uid", std::int64_t{1}}}, rt::ExecContext{1000});
    CHECK(missing.fault() != nullptr);

    rt::ExecutionResult wrong_type = rt::execute(
        *unit, scene.store, {{"uid", std::string("x")}, {"barcode", std::string("BC-1")}},
        rt::ExecContext{1000});
    CHECK(wrong_type.fault() != nullptr);
    CHECK(scene.store == before);
}

TEST_CASE("guard soundness matches evaluating the precondition") {
    // run on several stores; execute's outcome must match evaluate(pre)
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("borrowBook");
    const model::ContractDecl* contract = corpus_model().contract_for("borrowBook");
    const struct {
        const char* level;
        std::int64_t loaned;
        const char* status;
        const char* copy_status;
        bool reserved;
    } cases[] = {
        {"MASTER", 39, "NORMAL", "AVAILABLE", false},
        {"MASTER", 40, "NORMAL", "AVAILABLE", false},
        {"BACHELOR", 5, "SUSPENDED", "AVAILABLE", false},
        {"PHD", 10, "NORMAL", "LOANED", false},
        {"TEACHER", 0, "NORMAL", "RESERVED", true},
        {"BACHELOR", 0, "NORMAL", "RESERVED", false},
    };
    for (const auto& c : cases) {
        INFO(c.level, " loaned=", c.loaned, " ", c.status, " copy=", c.copy_status);
        BorrowScene scene = borrow_scene(c.level, c.loaned, c.status, c.copy_status, c.reserved);
        rt::EntityStore pre_state = scene.store;

        // oracle: evaluate the definitions, then the precondition, on the pre-state
        ocl::Bindings bindings{{"uid", std::int64_t{1}},
                               {"barcode", std::string("BC-1")},
                               {"today", std::int64_t{1000}}};
        for (const model::DefinitionBinding& def : contract->definitions) {
            bindings[def.name] = ocl::evaluate(*def.expr, pre_state, pre_state, bindings);
        }
        Value pre_holds = ocl::evaluate(*contract->precondition, pre_state, pre_state, bindings);

        rt::ExecutionResult r = run_borrow(scene.store, 1, "BC-1");
        CHECK(r.ok() == (pre_holds == Value{true}));
        if (!r.ok()) CHECK(scene.store == pre_state);
    }
}

TEST_CASE("object-returning units return the designated object") {
    rt::EntityStore s(corpus_schema());
    std::uint64_t user = s.create("User");
    s.set_attribute(user, "UserID", std::int64_t{7});
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("queryUser");
    rt::ExecutionResult r =
        rt::execute(*unit, s, {{"uid", std::int64_t{7}}}, rt::ExecContext{0});
    REQUIRE(r.ok());
    CHECK(r.success()->result == Value{ObjectRef{user}});
}

TEST_CASE("set-returning units return the selected set") {
    rt::EntityStore s(corpus_schema());
    std::uint64_t user = s.create("User");
    s.set_attribute(user, "UserID", std::int64_t{7});
    std::uint64_t loan_a = s.create("Loan");
    s.set_one_link(loan_a, "LoanedUser", user);
    std::uint64_t loan_b = s.create("Loan");
    s.set_one_link(loan_b, "LoanedUser", user);
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("listBorrowHistory");
    rt::ExecutionResult r =
        rt::execute(*unit, s, {{"uid", std::int64_t{7}}}, rt::ExecContext{0});
    REQUIRE(r.ok());
    CHECK(r.success()->result == Value{ObjectSet{ObjectRef{loan_a}, ObjectRef{loan_b}}});
}

TEST_CASE("deleteUser releases the object and clears references") {
    rt::EntityStore s(corpus_schema());
    std::uint64_t user = s.create("User");
    s.set_attribute(user, "UserID", std::int64_t{7});
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("deleteUser");
    rt::ExecutionResult r =
        rt::execute(*unit, s, {{"uid", std::int64_t{7}}}, rt::ExecContext{0});
    REQUIRE(r.ok());
    CHECK(s.extent("User").empty());

    // contract-satisfaction spot check: postcondition holds on the post-state
    rt::EntityStore pre(corpus_schema());
    std::uint64_t u2 = pre.create("User");
    pre.set_attribute(u2, "UserID", std::int64_t{9});
    rt::EntityStore post = pre;
    rt::ExecutionResult r2 =
        rt::execute(*unit, post, {{"uid", std::int64_t{9}}}, rt::ExecContext{0});
    REQUIRE(r2.ok());
    const model::ContractDecl* contract = corpus_model().contract_for("deleteUser");
    Value holds = ocl::evaluate(*contract->postcondition, pre, post, r2.bindings);
    CHECK(holds == Value{true});
}

TEST_CASE("countDownSuspensionDay unsuspends at zero") {
    rt::EntityStore s(corpus_schema());
    std::uint64_t user = s.create("User");
    s.set_attribute(user, "UserID", std::int64_t{4});
    s.set_attribute(user, "Status", EnumValue{"UserStatus", "SUSPENDED"});
    s.set_attribute(user, "SuspensionDays", std::int64_t{2});
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("countDownSuspensionDay");

    REQUIRE(rt::execute(*unit, s, {{"uid", std::int64_t{4}}}, rt::ExecContext{0}).ok());
    CHECK(s.attribute_of(user, "SuspensionDays") == Value{std::int64_t{1}});
    CHECK(s.attribute_of(user, "Status") == Value{EnumValue{"UserStatus", "SUSPENDED"}});

    REQUIRE(rt::execute(*unit, s, {{"uid", std::int64_t{4}}}, rt::ExecContext{0}).ok());
    CHECK(s.attribute_of(user, "SuspensionDays") == Value{std::int64_t{0}});
    CHECK(s.attribute_of(user, "Status") == Value{EnumValue{"UserStatus", "NORMAL"}});

    // now NORMAL: the guard rejects a third run
    rt::ExecutionResult r = rt::execute(*unit, s, {{"uid", std::int64_t{4}}}, rt::ExecContext{0});
    CHECK(r.precondition_failure() != nullptr);
}

TEST_CASE("conformance operations execute and satisfy their contracts") {
    // exercises the rules the corpus does not reach at runtime: a one-to-one
    // association pair, removeOneToOne, bare collection guards and the
    // folded createObject precondition row
    auto m = testutil::parse_or_throw(
        testutil::read_file(std::string(RMC_TESTDATA_DIR) + "/conformance.rm"), "conformance.rm");
    Diagnostics diags;
    auto app = logic::generate_application(*m, diags);
    REQUIRE(app != nullptr);
    rt::EntityStore s(app->schema);

    auto run_checked = [&](const char* op, ocl::Bindings inputs) {
        const logic::BusinessLogicUnit* unit = app->unit_for(op);
        REQUIRE(unit != nullptr);
        rt::EntityStore pre = s;
        rt::ExecutionResult r = rt::execute(*unit, s, inputs, rt::ExecContext{100});
        INFO("operation ", op);
        REQUIRE(r.ok());
        // two-state contract satisfaction on the conformance domain
        ocl::Bindings bindings = r.bindings;
        Value holds = ocl::evaluate(*unit->contract->postcondition, pre, s, bindings);
        CHECK(holds == Value{true});
        std::string why;
        CHECK(testutil::store_invariants_hold(s, &why));
        return r;
    };

    run_checked("makeWidget", {{"serial", std::int64_t{1}}});
    run_checked("makeWidget", {{"serial", std::int64_t{2}}});
    run_checked("makeWidget", {{"serial", std::int64_t{3}}});
    run_checked("makePart", {{"pid", std::int64_t{10}}});
    run_checked("attachPart", {{"serial", std::int64_t{1}}, {"pid", std::int64_t{10}}});

    std::uint64_t w1 = s.extent("Widget")[0].id;
    std::uint64_t w2 = s.extent("Widget")[1].id;
    std::uint64_t w3 = s.extent("Widget")[2].id;
    std::uint64_t part = s.extent("Part")[0].id;
    CHECK(s.link_of(part, "Owner") == Value{ObjectRef{w1}});
    CHECK(s.attribute_of(w1, "Count") == Value{std::int64_t{1}});

    // one-to-one pair: pairing maintains the inverse end
    run_checked("pairTwins", {{"sa", std::int64_t{1}}, {"sb", std::int64_t{2}}});
    CHECK(s.link_of(w1, "Twin") == Value{ObjectRef{w2}});
    CHECK(s.link_of(w2, "TwinOf") == Value{ObjectRef{w1}});
    // re-pairing displaces the old partner consistently
    run_checked("pairTwins", {{"sa", std::int64_t{1}}, {"sb", std::int64_t{3}}});
    CHECK(s.link_of(w1, "Twin") == Value{ObjectRef{w3}});
    CHECK(s.link_of(w3, "TwinOf") == Value{ObjectRef{w1}});
    CHECK(is_undefined(s.link_of(w2, "TwinOf")));

    run_checked("splitTwins", {{"serial", std::int64_t{1}}});
    CHECK(is_undefined(s.link_of(w1, "Twin")));
    CHECK(is_undefined(s.link_of(w3, "TwinOf")));

    run_checked("detachPart", {{"serial", std::int64_t{1}}, {"pid", std::int64_t{10}}});
    CHECK(s.link_of(w1, "Parts") == Value{ObjectSet{}});
    run_checked("scrapPart", {{"pid", std::int64_t{10}}});
    CHECK(s.extent("Part").empty());
    run_checked("touchWidget", {{"serial", std::int64_t{2}}});
    CHECK(s.attribute_of(w2, "Tint") == Value{EnumValue{"Color", "GREEN"}});

    // the folded precondition row still rejects duplicates via the dup find
    const logic::BusinessLogicUnit* make = app->unit_for("makeWidget");
    rt::ExecutionResult dup =
        rt::execute(*make, s, {{"serial", std::int64_t{1}}}, rt::ExecContext{100});
    CHECK(dup.precondition_failure() != nullptr);
}

TEST_CASE("created ids strictly increase across an operation sequence") {
    rt::EntityStore s(corpus_schema());
    const logic::BusinessLogicUnit* create = corpus_app().unit_for("createUser");
    const logic::BusinessLogicUnit* remove = corpus_app().unit_for("deleteUser");
    std::vector<std::uint64_t> created;
    for (std::int64_t uid = 1; uid <= 3; ++uid) {
        ocl::Bindings inputs{{"uid", uid},
                            {"name", std::string("N")},
                            {"level", EnumValue{"Level", "PHD"}}};
        REQUIRE(rt::execute(*create, s, inputs, rt::ExecContext{0}).ok());
        created.push_back(s.extent("User").back().id);
        if (uid == 2) {
            REQUIRE(rt::execute(*remove, s, {{"uid", std::int64_t{2}}}, rt::ExecContext{0}).ok());
        }
    }
    CHECK(created[0] < created[1]);
    CHECK(created[1] < created[2]); // the released id is never reused
}

TEST_CASE("execution is deterministic for equal stores and inputs") {
    BorrowScene a = borrow_scene("MASTER", 5, "NORMAL", "AVAILABLE", false);
    BorrowScene b = borrow_scene("MASTER", 5, "NORMAL", "AVAILABLE", false);
    rt::ExecutionResult ra = run_borrow(a.store, 1, "BC-1");
    rt::ExecutionResult rb = run_borrow(b.store, 1, "BC-1");
    REQUIRE(ra.ok());
    REQUIRE(rb.ok());
    CHECK(a.store == b.store);
    CHECK(ra.bindings == rb.bindings);
}

TEST_CASE("execution reports touched objects and duration") {
    BorrowScene scene = borrow_scene("MASTER", 0, "NORMAL", "AVAILABLE", false);
    rt::ExecutionResult r = run_borrow(scene.store, 1, "BC-1");
    REQUIRE(r.ok());
    CHECK(r.exec_ms >= 0.0);
    CHECK(r.touched.count(scene.user) == 1);
    CHECK(r.touched.count(scene.copy) == 1);
}
