#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include "rmcodec/logic.hpp"

using namespace rmc;
using testutil::corpus_app;
using testutil::corpus_model;

TEST_CASE("borrowBook unit mirrors the generation order") {
    const logic::BusinessLogicUnit* unit = corpus_app().unit_for("borrowBook");
    REQUIRE(unit != nullptr);
    CHECK(unit->signature.operation == "borrowBook");
    REQUIRE(unit->signature.inputs.size() == 2);
    CHECK(unit->signature.inputs[0].name == "uid");
    CHECK(unit->signature.inputs[0].type == integer_type());
    CHECK(unit->signature.inputs[1].name == "barcode");
    CHECK(unit->signature.inputs[1].type == string_type());
    CHECK(unit->signature.output == boolean_type());
    CHECK(unit->definition_block.size() == 3);
    CHECK(!unit->guard_actions.empty());
    CHECK(unit->failure.exception_name == "PreconditionIsNotSatisfied");
    CHECK(unit->failure.operation == "borrowBook");

    std::string ir = logic::render_ir(*unit);
    CHECK(ir == testutil::read_file(testutil::golden_path("borrowbook_ir.golden")));

    // block order: definition -> guard -> effects -> failure
    std::size_t def_at = ir.find("  define\n");
    std::size_t guard_at = ir.find("  guard\n");
    std::size_t effects_at = ir.find("  effects\n");
    std::size_t fail_at = ir.find("  onfail ");
    REQUIRE(def_at != std::string::npos);
    CHECK(def_at < guard_at);
    CHECK(guard_at < effects_at);
    CHECK(effects_at < fail_at);
}

TEST_CASE("every corpus unit serializes blocks in generation order") {
    for (const logic::ServiceUnit& service : corpus_app().services) {
        for (const logic::BusinessLogicUnit& unit : service.units) {
            std::string ir = logic::render_ir(unit);
            std::size_t def_at = ir.find("  define\n");
            std::size_t guard_at = ir.find("  guard\n");
            std::size_t effects_at = ir.find("  effects\n");
            std::size_t fail_at = ir.find("  onfail ");
            INFO("unit ", unit.signature.operation);
            CHECK(def_at < guard_at);
            CHECK(guard_at < effects_at);
            CHECK(effects_at < fail_at);
        }
    }
}

TEST_CASE("trivial contract generates the empty skeleton") {
    auto m = testutil::parse_or_throw(R"(
entity User { UserID : Integer }
service S { operation noop }
contract noop() : Boolean {
  precondition: true
  postcondition: true
}
)", "trivial.rm");
    Diagnostics diags;
    auto app = logic::generate_application(*m, diags);
    REQUIRE(app != nullptr);
    const logic::BusinessLogicUnit* unit = app->unit_for("noop");
    REQUIRE(unit != nullptr);
    CHECK(unit->definition_block.empty());
    CHECK(unit->guard_actions.empty());
    CHECK(unit->effect_block.empty());
    CHECK(unit->guard.kind == actions::GuardTree::Kind::True);
    CHECK(unit->failure.operation == "noop");
}

TEST_CASE("dataflow violation is a DataflowError") {
    auto m = testutil::parse_or_throw(R"(
entity User {
  UserID : Integer
  Boss : one User inverse Reports many
}
service S { operation f }
contract f(uid : Integer) : Boolean {
  definition:
    user = User.allInstances()->any(u | u.UserID = uid)
    boss = user.Boss
  precondition: user.oclIsUndefined() = false
  postcondition: boss.UserID = 1
}
)", "dataflow.rm");
    Diagnostics diags;
    auto classified = actions::classify_contract(m->contracts[0], *m, diags);
    REQUIRE(classified != nullptr);
    // drop the producer of `boss`; generation must flag the consumer
    actions::ClassifiedContract broken = *classified;
    broken.definition_actions.pop_back();
    Diagnostics gen_diags;
    auto unit = logic::generate_logic(broken, m->contracts[0], gen_diags);
    CHECK(unit == nullptr);
    bool found = false;
    for (const auto& d : gen_diags.items()) found |= d.code == Code::DataflowError;
    CHECK(found);
}

TEST_CASE("application assembles services in model order with a full schema") {
    const logic::ApplicationUnit& app = corpus_app();
    REQUIRE(app.services.size() == 6);
    CHECK(app.services[0].name == "SearchService");
    CHECK(app.services[1].name == "CatalogService");
    CHECK(app.services[2].name == "BookService");
    CHECK(app.services[3].name == "ListService");
    CHECK(app.services[4].name == "NotificationService");
    CHECK(app.services[5].name == "UserService");
    CHECK(app.unit_count() == 31);
    CHECK(app.entities.size() == 6);
    CHECK(app.enums.size() == 3);
    CHECK(app.schema->entities.size() == 6);
    // every entity a definition names is covered by the schema
    for (const logic::ServiceUnit& s : app.services) {
        for (const logic::BusinessLogicUnit& u : s.units) {
            for (const actions::AtomicAction& a : u.definition_block) {
                if (!a.entity.empty()) CHECK(app.schema->entity_index(a.entity) >= 0);
            }
        }
    }
}

TEST_CASE("empty model generates an empty application") {
    auto m = testutil::parse_or_throw("", "empty.rm");
    Diagnostics diags;
    auto app = logic::generate_application(*m, diags);
    REQUIRE(app != nullptr);
    CHECK(app->services.empty());
    CHECK(app->entities.empty());
}

TEST_CASE("generation reports all broken operations, not just the first") {
    auto m = testutil::parse_or_throw(R"(
entity User { UserID : Integer A : Integer B : Integer }
service S { operation f operation g operation h }
contract f(uid : Integer) : Boolean {
  definition: u = User.allInstances()->any(x | x.UserID = uid)
  precondition: u.oclIsUndefined() = false
  postcondition: u.A + u.B = 10
}
contract g(uid : Integer) : Boolean {
  definition: u = User.allInstances()->any(x | x.UserID = uid)
  precondition: u.oclIsUndefined() = false
  postcondition: u.A = 1
}
contract h(uid : Integer) : Boolean {
  definition: u = User.allInstances()->any(x | x.UserID = uid)
  precondition: u.oclIsUndefined() = false
  postcondition: u.B + u.A = 2
}
)", "broken.rm");
    Diagnostics diags;
    auto app = logic::generate_application(*m, diags);
    CHECK(app == nullptr);
    int equation_errors = 0;
    for (const auto& d : diags.items()) {
        if (d.code == Code::EquationFormError) ++equation_errors;
    }
    CHECK(equation_errors == 2); // f and h both reported
}

TEST_CASE("generation is deterministic") {
    Diagnostics d1, d2;
    auto a = logic::generate_application(corpus_model(), d1);
    auto b = logic::generate_application(corpus_model(), d2);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(logic::render_ir(*a) == logic::render_ir(*b));
}

TEST_CASE("whole-application IR matches the committed golden") {
    CHECK(logic::render_ir(corpus_app()) ==
          testutil::read_file(testutil::golden_path("corpus_ir.golden")));
}

TEST_CASE("per-operation generation time is recorded and small") {
    for (const logic::ServiceUnit& s : corpus_app().services) {
        for (const logic::BusinessLogicUnit& u : s.units) {
            CHECK(u.gen_ms >= 0.0);
            CHECK(u.gen_ms < 50.0);
        }
    }
}
