#include "rmcodec/logic.hpp"

#include <chrono>
#include <functional>
#include <set>
#include <sstream>

namespace rmc::logic {

using actions::ActionKind;
using actions::AtomicAction;
using actions::EffectConditional;
using actions::EffectItem;
using actions::EffectLet;
using actions::GuardTree;

const BusinessLogicUnit* ApplicationUnit::unit_for(const std::string& operation) const {
    for (const ServiceUnit& s : services) {
        for (const BusinessLogicUnit& u : s.units) {
            if (u.signature.operation == operation) return &u;
        }
    }
    return nullptr;
}

std::size_t ApplicationUnit::unit_count() const {
    std::size_t n = 0;
    for (const ServiceUnit& s : services) n += s.units.size();
    return n;
}

// ---------------------------------------------------------------- dataflow ---

namespace {

void free_vars(const ocl::Expr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ocl::VarRef>) {
                for (const std::string& b : bound) {
                    if (b == n.name) return;
                }
                out.insert(n.name);
            } else if constexpr (std::is_same_v<T, ocl::Nav>) {
                free_vars(*n.source, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::Iter>) {
                free_vars(*n.source, bound, out);
                bound.push_back(n.var);
                free_vars(*n.body, bound, out);
                bound.pop_back();
            } else if constexpr (std::is_same_v<T, ocl::CollectionOp>) {
                free_vars(*n.source, bound, out);
                if (n.arg) free_vars(*n.arg, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::StandardOp>) {
                free_vars(*n.source, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::Compare>) {
                free_vars(*n.lhs, bound, out);
                free_vars(*n.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::Arith>) {
                free_vars(*n.lhs, bound, out);
                free_vars(*n.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::BoolBin>) {
                free_vars(*n.lhs, bound, out);
                free_vars(*n.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::NotExpr>) {
                free_vars(*n.operand, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::IfExpr>) {
                free_vars(*n.cond, bound, out);
                free_vars(*n.then_branch, bound, out);
                free_vars(*n.else_branch, bound, out);
            } else if constexpr (std::is_same_v<T, ocl::LetExpr>) {
                std::size_t pushed = 0;
                for (const auto& b : n.bindings) {
                    free_vars(*b.value, bound, out);
                    bound.push_back(b.name);
                    ++pushed;
                }
                free_vars(*n.body, bound, out);
                while (pushed--) bound.pop_back();
            }
        },
        e.node);
}

struct DataflowChecker {
    const std::string& operation;
    Diagnostics& diags;
    bool ok = true;

    void expect(const std::set<std::string>& produced, const std::string& name, const Span& span) {
        if (!produced.count(name)) {
            diags.add(Code::DataflowError, span,
                      "operation '" + operation + "' uses variable '" + name +
                          "' that no input or definition produces");
            ok = false;
        }
    }

    void check_expr(const std::set<std::string>& produced, const ocl::Expr& e) {
        std::set<std::string> used;
        std::vector<std::string> bound;
        free_vars(e, bound, used);
        for (const std::string& name : used) expect(produced, name, e.span);
    }

    void check_action(const std::set<std::string>& produced, const AtomicAction& a) {
        switch (a.kind) {
            case ActionKind::FindAssociationObject:
            case ActionKind::FindAssociationObjects:
                expect(produced, a.entity_var, a.span);
                break;
            case ActionKind::FindObject:
            case ActionKind::FindObjects:
                break;
            case ActionKind::CreateObject:
                break;
            default:
                if (!a.var.empty()) expect(produced, a.var, a.span);
                break;
        }
        if (a.value) check_expr(produced, *a.value);
        if (a.value2) check_expr(produced, *a.value2);
        if (a.source) check_expr(produced, *a.source);
        for (const actions::FindCondition& c : a.conditions) check_expr(produced, *c.value);
    }

    void check_effects(std::set<std::string> produced, const std::vector<EffectItem>& items,
                       std::set<std::string>& produced_out) {
        for (const EffectItem& item : items) {
            if (const auto* a = std::get_if<AtomicAction>(&item)) {
                check_action(produced, *a);
                if (a->kind == ActionKind::CreateObject) produced.insert(a->var);
            } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
                for (const AtomicAction& c : cond->condition_actions) check_action(produced, c);
                std::set<std::string> after_then = produced;
                std::set<std::string> after_else = produced;
                check_effects(produced, cond->then_items, after_then);
                check_effects(produced, cond->else_items, after_else);
                produced.insert(after_then.begin(), after_then.end());
                produced.insert(after_else.begin(), after_else.end());
            } else {
                const auto& let = std::get<EffectLet>(item);
                std::set<std::string> inner = produced;
                for (const auto& [name, value] : let.bindings) {
                    check_expr(inner, *value);
                    inner.insert(name);
                }
                std::set<std::string> after;
                check_effects(inner, let.items, after);
                // let-scoped names stay inside the let
            }
        }
        produced_out = produced;
    }
};

} // namespace

std::unique_ptr<BusinessLogicUnit> generate_logic(const actions::ClassifiedContract& classified,
                                                  const model::ContractDecl& contract,
                                                  Diagnostics& diags) {
    auto unit = std::make_unique<BusinessLogicUnit>();
    unit->signature.operation = contract.operation;
    unit->signature.inputs = contract.inputs;
    unit->signature.output = contract.output;
    unit->definition_block = classified.definition_actions;
    unit->guard = classified.guard;
    unit->guard_actions = classified.guard_actions;
    unit->effect_block = classified.effects;
    unit->result_expr = classified.result_expr;
    unit->failure.operation = contract.operation;
    unit->contract = &contract;

    DataflowChecker checker{contract.operation, diags};
    std::set<std::string> produced{"today"};
    for (const model::ParamDecl& p : contract.inputs) produced.insert(p.name);
    for (const AtomicAction& a : unit->definition_block) {
        checker.check_action(produced, a);
        produced.insert(a.var);
    }
    for (const AtomicAction& a : unit->guard_actions) checker.check_action(produced, a);
    std::set<std::string> after_effects;
    checker.check_effects(produced, unit->effect_block, after_effects);
    if (unit->result_expr) checker.check_expr(after_effects, *unit->result_expr);
    if (!checker.ok) return nullptr;
    return unit;
}

std::unique_ptr<ApplicationUnit> generate_application(const model::RequirementModel& m,
                                                      Diagnostics& diags) {
    auto app = std::make_unique<ApplicationUnit>();
    app->entities = m.entities;
    app->enums = m.enums;
    app->schema = rt::build_schema(m);

    bool ok = true;
    for (const model::ServiceDecl& service : m.services) {
        ServiceUnit su;
        su.name = service.name;
        for (const model::OperationRef& op : service.operations) {
            const model::ContractDecl* contract = m.contract_for(op.name);
            if (!contract) {
                diags.add(Code::ContractArityError, op.span,
                          "operation '" + op.name + "' has no contract");
                ok = false;
                continue;
            }
            auto started = std::chrono::steady_clock::now();
            auto classified = actions::classify_contract(*contract, m, diags);
            if (!classified) {
                ok = false;
                continue;
            }
            auto unit = generate_logic(*classified, *contract, diags);
            if (!unit) {
                ok = false;
                continue;
            }
            auto ended = std::chrono::steady_clock::now();
            unit->gen_ms = std::chrono::duration<double, std::milli>(ended - started).count();
            su.units.push_back(std::move(*unit));
        }
        app->services.push_back(std::move(su));
    }
    if (!ok) return nullptr;
    return app;
}

// ---------------------------------------------------------------------- IR ---

namespace {

void render_guard_tree(const GuardTree& tree, const std::vector<AtomicAction>& actions,
                       int indent, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (tree.kind) {
        case GuardTree::Kind::True:
            os << pad << "true\n";
            return;
        case GuardTree::Kind::Leaf:
            os << pad << render_action(actions[tree.leaf]) << "\n";
            return;
        case GuardTree::Kind::And:
        case GuardTree::Kind::Or:
            os << pad << (tree.kind == GuardTree::Kind::And ? "and" : "or") << "\n";
            for (const GuardTree& child : tree.children) {
                render_guard_tree(child, actions, indent + 1, os);
            }
            return;
        case GuardTree::Kind::Not:
            os << pad << "not\n";
            render_guard_tree(tree.children[0], actions, indent + 1, os);
            return;
        case GuardTree::Kind::If:
            os << pad << "if\n";
            render_guard_tree(tree.children[0], actions, indent + 1, os);
            os << pad << "then\n";
            render_guard_tree(tree.children[1], actions, indent + 1, os);
            os << pad << "else\n";
            render_guard_tree(tree.children[2], actions, indent + 1, os);
            return;
    }
}

void render_effects(const std::vector<EffectItem>& items, int indent, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const EffectItem& item : items) {
        if (const auto* a = std::get_if<AtomicAction>(&item)) {
            os << pad << render_action(*a) << "\n";
        } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
            os << pad << "when\n";
            render_guard_tree(cond->condition, cond->condition_actions, indent + 1, os);
            os << pad << "then\n";
            render_effects(cond->then_items, indent + 1, os);
            if (!cond->else_items.empty()) {
                os << pad << "else\n";
                render_effects(cond->else_items, indent + 1, os);
            }
        } else {
            const auto& let = std::get<EffectLet>(item);
            os << pad << "let";
            for (std::size_t i = 0; i < let.bindings.size(); ++i) {
                os << (i ? ", " : " ") << let.bindings[i].first << " = "
                   << ocl::render_expr(*let.bindings[i].second);
            }
            os << "\n";
            render_effects(let.items, indent + 1, os);
        }
    }
}

} // namespace

std::string render_ir(const BusinessLogicUnit& unit) {
    std::ostringstream os;
    os << "unit " << unit.signature.operation << "(";
    for (std::size_t i = 0; i < unit.signature.inputs.size(); ++i) {
        if (i) os << ", ";
        os << unit.signature.inputs[i].name << " : " << render_type(unit.signature.inputs[i].type);
    }
    os << ") : " << render_type(unit.signature.output) << "\n";
    os << "  define\n";
    for (const AtomicAction& a : unit.definition_block) {
        os << "    " << render_action(a) << "\n";
    }
    os << "  guard\n";
    render_guard_tree(unit.guard, unit.guard_actions, 2, os);
    os << "  effects\n";
    render_effects(unit.effect_block, 2, os);
    if (unit.result_expr) {
        os << "  result " << ocl::render_expr(*unit.result_expr) << "\n";
    }
    os << "  onfail " << unit.failure.exception_name << "(" << unit.failure.operation << ")\n";
    return os.str();
}

std::string render_ir(const ApplicationUnit& app) {
    std::ostringstream os;
    for (const ServiceUnit& s : app.services) {
        os << "service " << s.name << "\n";
        for (const BusinessLogicUnit& u : s.units) {
            std::istringstream unit_text(render_ir(u));
            std::string line;
            while (std::getline(unit_text, line)) {
                os << "  " << line << "\n";
            }
        }
    }
    return os.str();
}

} // namespace rmc::logic
