#pragma once

#include "rmcodec/actions.hpp"
#include "rmcodec/executor.hpp"
#include "rmcodec/logic.hpp"
#include "rmcodec/model.hpp"
#include "rmcodec/ocl_eval.hpp"
#include "rmcodec/store.hpp"

#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string corpus_path(const std::string& name) {
    return std::string(RMC_CORPUS_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(RMC_GOLDEN_DIR) + "/" + name;
}

// Parses a model or throws; most tests want a hard failure with diagnostics.
inline std::unique_ptr<rmc::model::RequirementModel> parse_or_throw(const std::string& source,
                                                                    const std::string& origin) {
    rmc::Diagnostics diags;
    auto model = rmc::model::parse_model(source, origin, diags);
    if (!model) throw std::runtime_error("model error:\n" + diags.to_string());
    return model;
}

inline const rmc::model::RequirementModel& corpus_model() {
    static std::unique_ptr<rmc::model::RequirementModel> model =
        parse_or_throw(read_file(corpus_path("library.rm")), "library.rm");
    return *model;
}

inline const rmc::logic::ApplicationUnit& corpus_app() {
    static std::unique_ptr<rmc::logic::ApplicationUnit> app = [] {
        rmc::Diagnostics diags;
        auto result = rmc::logic::generate_application(corpus_model(), diags);
        if (!result) throw std::runtime_error("corpus failed to compile:\n" + diags.to_string());
        return result;
    }();
    return *app;
}

// ------------------------------------------------------ clause-count oracle ---
//
// Independent accounting of a contract's atomic conjuncts and expected action
// count. Walks the raw AST with its own rules; the classifier must agree.

namespace oracle {

inline bool is_true_lit(const rmc::ocl::Expr& e) {
    const auto* b = rmc::ocl::as<rmc::ocl::BoolLit>(e);
    return b && b->value;
}

inline void flatten_and(const rmc::ocl::Expr& e, std::vector<const rmc::ocl::Expr*>& out) {
    const auto* bin = rmc::ocl::as<rmc::ocl::BoolBin>(e);
    if (bin && bin->op == rmc::ocl::BoolKind::And) {
        flatten_and(*bin->lhs, out);
        flatten_and(*bin->rhs, out);
        return;
    }
    out.push_back(&e);
}

// all non-`true` leaves of an and/or/not tree
inline int boolean_leaves(const rmc::ocl::Expr& e) {
    if (is_true_lit(e)) return 0;
    if (const auto* bin = rmc::ocl::as<rmc::ocl::BoolBin>(e)) {
        return boolean_leaves(*bin->lhs) + boolean_leaves(*bin->rhs);
    }
    if (const auto* inv = rmc::ocl::as<rmc::ocl::NotExpr>(e)) {
        return boolean_leaves(*inv->operand);
    }
    if (const auto* ife = rmc::ocl::as<rmc::ocl::IfExpr>(e)) {
        return boolean_leaves(*ife->cond) + boolean_leaves(*ife->then_branch) +
               boolean_leaves(*ife->else_branch);
    }
    return 1;
}

inline bool is_membership(const rmc::ocl::Expr& e, rmc::ocl::CollOp op, std::string* var) {
    const auto* coll = rmc::ocl::as<rmc::ocl::CollectionOp>(e);
    if (!coll || coll->op != op || !coll->arg) return false;
    if (!rmc::ocl::as<rmc::ocl::AllInstances>(*coll->source)) return false;
    const auto* v = rmc::ocl::as<rmc::ocl::VarRef>(*coll->arg);
    if (!v) return false;
    if (var) *var = v->name;
    return true;
}

inline bool is_ocl_is_new(const rmc::ocl::Expr& e, std::string* var) {
    const auto* op = rmc::ocl::as<rmc::ocl::StandardOp>(e);
    if (!op || op->op != rmc::ocl::StdOp::OclIsNew) return false;
    const auto* v = rmc::ocl::as<rmc::ocl::VarRef>(*op->source);
    if (!v) return false;
    if (var) *var = v->name;
    return true;
}

inline bool is_release_clause(const rmc::ocl::Expr& e, std::string* var) {
    const auto* cmp = rmc::ocl::as<rmc::ocl::Compare>(e);
    if (!cmp || cmp->op != rmc::ocl::CmpOp::Eq) return false;
    const auto* lit = rmc::ocl::as<rmc::ocl::BoolLit>(*cmp->rhs);
    if (!lit || !lit->value) return false;
    const auto* op = rmc::ocl::as<rmc::ocl::StandardOp>(*cmp->lhs);
    if (!op || op->op != rmc::ocl::StdOp::OclIsUndefined) return false;
    const auto* v = rmc::ocl::as<rmc::ocl::VarRef>(*op->source);
    if (!v) return false;
    if (var) *var = v->name;
    return true;
}

inline bool is_result_designation(const rmc::ocl::Expr& e) {
    const auto* cmp = rmc::ocl::as<rmc::ocl::Compare>(e);
    if (!cmp || cmp->op != rmc::ocl::CmpOp::Eq) return false;
    const auto* v = rmc::ocl::as<rmc::ocl::VarRef>(*cmp->lhs);
    return v && v->name == "result";
}

struct Counts {
    int conjuncts = 0; // atomic clauses, companions counted individually
    int actions = 0;   // expected AA contribution
};

// Effect conjunct walk: counts clauses and expected actions, folding adjacent
// creation/release companion pairs into single actions.
inline void count_post_list(const std::vector<const rmc::ocl::Expr*>& list, Counts& c) {
    for (std::size_t i = 0; i < list.size(); ++i) {
        const rmc::ocl::Expr& e = *list[i];
        if (is_true_lit(e)) continue;
        if (is_result_designation(e)) {
            c.conjuncts += 1; // accounted, but not an action
            continue;
        }
        std::string var, var2;
        if (is_ocl_is_new(e, &var)) {
            c.actions += 1;
            c.conjuncts += 1;
            if (i + 1 < list.size() && is_membership(*list[i + 1], rmc::ocl::CollOp::Includes,
                                                     &var2) && var2 == var) {
                c.conjuncts += 1;
                ++i;
            }
            continue;
        }
        if (is_membership(e, rmc::ocl::CollOp::Includes, &var)) {
            // reversed creation pair
            if (i + 1 < list.size() && is_ocl_is_new(*list[i + 1], &var2) && var2 == var) {
                c.actions += 1;
                c.conjuncts += 2;
                ++i;
            }
            continue;
        }
        if (is_membership(e, rmc::ocl::CollOp::Excludes, &var)) {
            if (i + 1 < list.size() && is_release_clause(*list[i + 1], &var2) && var2 == var) {
                c.actions += 1;
                c.conjuncts += 2;
                ++i;
            }
            continue;
        }
        if (is_release_clause(e, &var)) {
            c.actions += 1;
            c.conjuncts += 1;
            if (i + 1 < list.size() &&
                is_membership(*list[i + 1], rmc::ocl::CollOp::Excludes, &var2) && var2 == var) {
                c.conjuncts += 1;
                ++i;
            }
            continue;
        }
        if (const auto* ife = rmc::ocl::as<rmc::ocl::IfExpr>(e)) {
            c.conjuncts += boolean_leaves(*ife->cond);
            c.actions += boolean_leaves(*ife->cond);
            std::vector<const rmc::ocl::Expr*> then_list, else_list;
            flatten_and(*ife->then_branch, then_list);
            flatten_and(*ife->else_branch, else_list);
            count_post_list(then_list, c);
            count_post_list(else_list, c);
            continue;
        }
        if (const auto* let = rmc::ocl::as<rmc::ocl::LetExpr>(e)) {
            std::vector<const rmc::ocl::Expr*> body;
            flatten_and(*let->body, body);
            count_post_list(body, c);
            continue;
        }
        c.conjuncts += 1;
        c.actions += 1;
    }
}

// Precondition clauses fold the created-object excludes row into the create.
inline void count_pre(const rmc::ocl::Expr& e, const rmc::model::ContractDecl& contract,
                      Counts& c) {
    if (is_true_lit(e)) return;
    if (const auto* bin = rmc::ocl::as<rmc::ocl::BoolBin>(e)) {
        count_pre(*bin->lhs, contract, c);
        count_pre(*bin->rhs, contract, c);
        return;
    }
    if (const auto* inv = rmc::ocl::as<rmc::ocl::NotExpr>(e)) {
        count_pre(*inv->operand, contract, c);
        return;
    }
    if (const auto* ife = rmc::ocl::as<rmc::ocl::IfExpr>(e)) {
        count_pre(*ife->cond, contract, c);
        count_pre(*ife->then_branch, contract, c);
        count_pre(*ife->else_branch, contract, c);
        return;
    }
    std::string var;
    if (is_membership(e, rmc::ocl::CollOp::Excludes, &var)) {
        for (const auto& [name, entity] : contract.created_vars) {
            if (name == var) {
                c.conjuncts += 1; // folded into createObject, no guard action
                return;
            }
        }
    }
    c.conjuncts += 1;
    c.actions += 1;
}

struct ContractCounts {
    int clause_total = 0;
    int expected_aa = 0;
};

inline ContractCounts count_contract(const rmc::model::ContractDecl& contract) {
    Counts c;
    c.conjuncts += static_cast<int>(contract.definitions.size());
    c.actions += static_cast<int>(contract.definitions.size());
    count_pre(*contract.precondition, contract, c);
    std::vector<const rmc::ocl::Expr*> post;
    flatten_and(*contract.postcondition, post);
    count_post_list(post, c);
    return ContractCounts{c.conjuncts, c.actions};
}

} // namespace oracle

// -------------------------------------------------- random store generation ---

struct RandomScene {
    rmc::rt::EntityStore store;
    std::int64_t today = 0;
};

// Randomized but schema-valid library stores. Links are set through the
// store's inverse-maintaining API; some loans/reserves are detached from the
// holding sets the way returnBook/cannelReservation leave them.
inline RandomScene random_library_store(const rmc::rt::SchemaPtr& schema, std::mt19937& rng) {
    using rmc::EnumValue;
    rmc::rt::EntityStore s(schema);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    auto chance = [&](int percent) { return pick(1, 100) <= percent; };

    static const char* levels[] = {"BACHELOR", "MASTER", "PHD", "TEACHER"};
    static const char* copy_statuses[] = {"AVAILABLE", "LOANED", "RESERVED"};
    static const char* titles[] = {"Alpha", "Beta", "Gamma"};
    static const char* subjects[] = {"Computing", "History"};

    std::int64_t today = 1000 + pick(-20, 20);

    std::vector<std::uint64_t> users;
    int n_users = pick(1, 5);
    for (int i = 0; i < n_users; ++i) {
        std::uint64_t id = s.create("User");
        s.set_attribute(id, "UserID", static_cast<std::int64_t>(pick(1, 6)));
        s.set_attribute(id, "Name", std::string("User") + std::to_string(i));
        s.set_attribute(id, "Level", EnumValue{"Level", levels[pick(0, 3)]});
        s.set_attribute(id, "Status",
                        EnumValue{"UserStatus", chance(70) ? "NORMAL" : "SUSPENDED"});
        // spread across the 20/40/60 loan limits
        std::int64_t loaned = pick(0, 70);
        s.set_attribute(id, "LoanedNumber", loaned);
        s.set_attribute(id, "OverDueFee", chance(50) ? 0.0 : pick(1, 80) * 0.25);
        s.set_attribute(id, "SuspensionDays", static_cast<std::int64_t>(pick(0, 3)));
        users.push_back(id);
    }
    int n_librarians = pick(0, 2);
    for (int i = 0; i < n_librarians; ++i) {
        std::uint64_t id = s.create("Librarian");
        s.set_attribute(id, "LibrarianID", static_cast<std::int64_t>(pick(1, 4)));
        s.set_attribute(id, "Name", std::string("Lib") + std::to_string(i));
    }
    std::vector<std::uint64_t> books;
    int n_books = pick(0, 3);
    for (int i = 0; i < n_books; ++i) {
        std::uint64_t id = s.create("Book");
        s.set_attribute(id, "ISBN", std::string("ISBN-") + std::to_string(pick(1, 5)));
        s.set_attribute(id, "Title", std::string(titles[pick(0, 2)]));
        s.set_attribute(id, "Author", std::string("Author") + std::to_string(pick(1, 3)));
        s.set_attribute(id, "Subject", std::string(subjects[pick(0, 1)]));
        s.set_attribute(id, "IsRecommended", chance(40));
        s.set_attribute(id, "RecommendCount", static_cast<std::int64_t>(pick(0, 5)));
        books.push_back(id);
    }
    std::vector<std::uint64_t> copies;
    int n_copies = pick(0, 5);
    for (int i = 0; i < n_copies; ++i) {
        std::uint64_t id = s.create("BookCopy");
        s.set_attribute(id, "BarCode", std::string("BC-") + std::to_string(pick(1, 7)));
        s.set_attribute(id, "Status", EnumValue{"CopyStatus", copy_statuses[pick(0, 2)]});
        s.set_attribute(id, "IsReserved", chance(25));
        if (!books.empty() && chance(85)) {
            s.set_one_link(id, "OfBook", books[static_cast<std::size_t>(pick(0, n_books - 1))]);
        }
        copies.push_back(id);
    }
    int n_loans = copies.empty() || users.empty() ? 0 : pick(0, 4);
    for (int i = 0; i < n_loans; ++i) {
        std::uint64_t id = s.create("Loan");
        std::int64_t due = today + pick(-30, 30);
        s.set_attribute(id, "LoanDate", due - 30);
        s.set_attribute(id, "DueDate", due);
        bool returned = chance(30);
        s.set_attribute(id, "ReturnDate", returned ? due - pick(0, 10) : std::int64_t{0});
        s.set_attribute(id, "IsReturned", returned);
        s.set_attribute(id, "RenewTimes", static_cast<std::int64_t>(pick(0, 3)));
        std::uint64_t u = users[static_cast<std::size_t>(pick(0, n_users - 1))];
        std::uint64_t c = copies[static_cast<std::size_t>(pick(0, n_copies - 1))];
        if (chance(90)) s.set_one_link(id, "LoanedUser", u);
        if (chance(90)) s.set_one_link(id, "LoanedCopy", c);
        if (returned) {
            s.remove_many_link(u, "LoanedBooks", id);
            s.remove_many_link(c, "LoanedRecords", id);
        }
    }
    int n_reserves = copies.empty() || users.empty() ? 0 : pick(0, 3);
    for (int i = 0; i < n_reserves; ++i) {
        std::uint64_t id = s.create("Reserve");
        s.set_attribute(id, "ReserveDate", today - pick(0, 20));
        bool closed = chance(30);
        s.set_attribute(id, "IsReservedClosed", closed);
        std::uint64_t u = users[static_cast<std::size_t>(pick(0, n_users - 1))];
        std::uint64_t c = copies[static_cast<std::size_t>(pick(0, n_copies - 1))];
        if (chance(90)) s.set_one_link(id, "ReservedUser", u);
        if (chance(90)) s.set_one_link(id, "ReservedCopy", c);
        if (closed) {
            s.remove_many_link(u, "Reservations", id);
            s.remove_many_link(c, "ReservedRecords", id);
        }
    }
    return RandomScene{std::move(s), today};
}

// Random inputs for one corpus operation; drawn from the same pools the
// generator uses so lookups hit real objects often.
inline rmc::ocl::Bindings random_inputs(const rmc::model::ContractDecl& contract,
                                        std::mt19937& rng) {
    rmc::ocl::Bindings out;
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    static const char* levels[] = {"BACHELOR", "MASTER", "PHD", "TEACHER"};
    static const char* titles[] = {"Alpha", "Beta", "Gamma", "Delta"};
    static const char* subjects[] = {"Computing", "History", "Drama"};
    for (const rmc::model::ParamDecl& p : contract.inputs) {
        using K = rmc::StaticType::Kind;
        switch (p.type.kind) {
            case K::Integer:
                out[p.name] = static_cast<std::int64_t>(pick(1, 7));
                break;
            case K::Date:
                out[p.name] = static_cast<std::int64_t>(1000 + pick(-10, 10));
                break;
            case K::Real:
                out[p.name] = pick(0, 40) * 0.25;
                break;
            case K::Boolean:
                out[p.name] = pick(0, 1) == 1;
                break;
            case K::String:
                if (p.name == "barcode") {
                    out[p.name] = std::string("BC-") + std::to_string(pick(1, 8));
                } else if (p.name == "isbn") {
                    out[p.name] = std::string("ISBN-") + std::to_string(pick(1, 6));
                } else if (p.name == "title") {
                    out[p.name] = std::string(titles[pick(0, 3)]);
                } else if (p.name == "author") {
                    out[p.name] = std::string("Author") + std::to_string(pick(1, 4));
                } else if (p.name == "subject") {
                    out[p.name] = std::string(subjects[pick(0, 2)]);
                } else {
                    out[p.name] = std::string("Name") + std::to_string(pick(1, 9));
                }
                break;
            case K::Enum:
                out[p.name] = rmc::EnumValue{p.type.name, levels[pick(0, 3)]};
                break;
            default:
                break;
        }
    }
    return out;
}

// ----------------------------------------------- reference borrowBook oracle ---
//
// Direct transcription of the generated-code listing for borrowBook: find the
// existing objects, validate, create the loan, set both reference directions,
// update states. Used to cross-check execute() on the borrow scenarios.
inline bool reference_borrow_book(rmc::rt::EntityStore& s, std::int64_t uid,
                                  const std::string& barcode, std::int64_t today) {
    using rmc::EnumValue;
    using rmc::ObjectRef;
    using rmc::Value;

    Value user_v = s.find("User", "UserID", rmc::ocl::CmpOp::Eq, uid);
    Value copy_v = s.find("BookCopy", "BarCode", rmc::ocl::CmpOp::Eq, barcode);
    if (rmc::is_undefined(user_v) || rmc::is_undefined(copy_v)) return false;
    std::uint64_t user = std::get<ObjectRef>(user_v).id;
    std::uint64_t copy = std::get<ObjectRef>(copy_v).id;

    std::uint64_t reserve = 0;
    bool has_reserve = false;
    for (const rmc::rt::ObjectRecord& rec : s.extent("Reserve")) {
        Value ru = s.link_of(rec.id, "ReservedUser");
        Value rc = s.link_of(rec.id, "ReservedCopy");
        Value closed = s.attribute_of(rec.id, "IsReservedClosed");
        const ObjectRef* rup = std::get_if<ObjectRef>(&ru);
        const ObjectRef* rcp = std::get_if<ObjectRef>(&rc);
        if (rup && rcp && rup->id == user && rcp->id == copy && closed == Value{false}) {
            reserve = rec.id;
            has_reserve = true;
            break;
        }
    }

    if (s.attribute_of(user, "Status") != Value{EnumValue{"UserStatus", "NORMAL"}}) return false;
    const EnumValue level = std::get<EnumValue>(s.attribute_of(user, "Level"));
    std::int64_t limit = level.literal == "BACHELOR" ? 20 : level.literal == "MASTER" ? 40 : 60;
    if (std::get<std::int64_t>(s.attribute_of(user, "LoanedNumber")) >= limit) return false;

    Value status = s.attribute_of(copy, "Status");
    bool reserved_path = has_reserve && status == Value{EnumValue{"CopyStatus", "RESERVED"}};
    bool direct_path = status == Value{EnumValue{"CopyStatus", "AVAILABLE"}};
    if (!reserved_path && !direct_path) return false;

    std::uint64_t loan = s.create("Loan");
    s.set_attribute(loan, "LoanDate", today);
    s.set_attribute(loan, "DueDate",
                    today + (level.literal == "TEACHER" ? std::int64_t{60} : std::int64_t{30}));
    s.set_attribute(loan, "IsReturned", false);
    s.set_attribute(loan, "RenewTimes", std::int64_t{0});
    s.set_one_link(loan, "LoanedUser", user);
    s.set_one_link(loan, "LoanedCopy", copy);
    s.add_many_link(user, "LoanedBooks", loan);
    s.add_many_link(copy, "LoanedRecords", loan);
    s.set_attribute(user, "LoanedNumber",
                    std::get<std::int64_t>(s.attribute_of(user, "LoanedNumber")) + 1);
    if (has_reserve) {
        s.set_attribute(copy, "IsReserved", false);
        s.set_attribute(reserve, "IsReservedClosed", true);
    }
    s.set_attribute(copy, "Status", EnumValue{"CopyStatus", "LOANED"});
    return true;
}

// -------------------------------------------------------- store-wide sweeps ---

// Referential integrity plus one-to-one inverse consistency.
inline bool store_invariants_hold(const rmc::rt::EntityStore& s, std::string* why = nullptr) {
    const rmc::rt::Schema& schema = s.schema();
    for (std::size_t ei = 0; ei < schema.entities.size(); ++ei) {
        const rmc::rt::SchemaEntity& se = schema.entities[ei];
        for (const rmc::rt::ObjectRecord& rec : s.extent(static_cast<int>(ei))) {
            for (std::size_t li = 0; li < se.ends.size(); ++li) {
                const rmc::rt::SchemaEnd& end = se.ends[li];
                const rmc::rt::LinkSlot& slot = rec.links[li];
                auto check_target = [&](std::uint64_t target) {
                    if (!s.exists(target)) {
                        if (why) {
                            *why = se.name + "#" + std::to_string(rec.id) + "." + end.name +
                                   " dangles to #" + std::to_string(target);
                        }
                        return false;
                    }
                    if (end.mult == rmc::Mult::One && end.inverse_mult == rmc::Mult::One) {
                        rmc::Value back = s.link_of(target, end.inverse);
                        const rmc::ObjectRef* ref = std::get_if<rmc::ObjectRef>(&back);
                        if (!ref || ref->id != rec.id) {
                            if (why) {
                                *why = se.name + "#" + std::to_string(rec.id) + "." + end.name +
                                       " has inconsistent one-to-one inverse";
                            }
                            return false;
                        }
                    }
                    return true;
                };
                if (const auto* single = std::get_if<rmc::rt::SingleLink>(&slot)) {
                    if (*single && !check_target(**single)) return false;
                } else {
                    for (std::uint64_t t : std::get<rmc::rt::ManyLink>(slot)) {
                        if (!check_target(t)) return false;
                    }
                }
            }
        }
    }
    return true;
}

} // namespace testutil
