#include "rmcodec/actions.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

namespace rmc::actions {

const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::CreateObject: return "createObject";
        case ActionKind::AddOneToManyAssociation: return "addOneToManyAssociation";
        case ActionKind::AddOneToOneAssociation: return "addOneToOneAssociation";
        case ActionKind::FindObject: return "findObject";
        case ActionKind::FindObjects: return "findObjects";
        case ActionKind::FindAssociationObject: return "findAssociationObject";
        case ActionKind::FindAssociationObjects: return "findAssociationObjects";
        case ActionKind::StandardOperationToObject: return "standardOperationToObject";
        case ActionKind::StandardOperationToObjects: return "standardOperationToObjects";
        case ActionKind::CheckAttributeState: return "checkAttributeState";
        case ActionKind::CheckObjectState: return "checkObjectState";
        case ActionKind::CheckCollectionState: return "checkCollectionState";
        case ActionKind::UpdateObject: return "updateObject";
        case ActionKind::UpdateObjectWithNew: return "updateObjectWithNew";
        case ActionKind::ReleaseObject: return "releaseObject";
        case ActionKind::RemoveOneToManyAssociation: return "removeOneToManyAssociation";
        case ActionKind::RemoveOneToOneAssociation: return "removeOneToOneAssociation";
    }
    return "?";
}

std::string render_action(const AtomicAction& a) {
    std::ostringstream os;
    os << action_kind_name(a.kind) << '(';
    switch (a.kind) {
        case ActionKind::CreateObject:
        case ActionKind::ReleaseObject:
            os << a.var << ", " << a.entity;
            break;
        case ActionKind::FindObject:
        case ActionKind::FindObjects:
            os << a.var << " : " << a.entity;
            for (const FindCondition& c : a.conditions) {
                os << ", " << c.attribute << ' ' << ocl::cmp_op_text(c.op) << ' '
                   << ocl::render_expr(*c.value);
            }
            break;
        case ActionKind::FindAssociationObject:
        case ActionKind::FindAssociationObjects:
            os << a.var << ", " << a.entity_var << '.' << a.member;
            break;
        case ActionKind::StandardOperationToObject:
            os << a.var << ", " << a.member;
            break;
        case ActionKind::StandardOperationToObjects:
            os << ocl::render_expr(*a.source) << ", " << a.member;
            if (a.value2) os << ", " << ocl::render_expr(*a.value2);
            break;
        case ActionKind::CheckAttributeState:
            os << a.var << ", " << a.member << (a.at_pre ? "@pre" : "") << ", "
               << ocl::cmp_op_text(a.op) << ", " << ocl::render_expr(*a.value);
            break;
        case ActionKind::CheckObjectState:
            os << a.var << ", " << a.member << ", " << ocl::cmp_op_text(a.op) << ", "
               << ocl::render_expr(*a.value);
            break;
        case ActionKind::CheckCollectionState:
            os << ocl::render_expr(*a.source) << ", " << a.member;
            if (a.value2) os << '(' << ocl::render_expr(*a.value2) << ')';
            os << ", " << ocl::cmp_op_text(a.op) << ", " << ocl::render_expr(*a.value);
            break;
        case ActionKind::UpdateObject:
            os << a.var << ", " << a.member << ", " << ocl::arith_op_text(a.arith_op) << ", "
               << ocl::render_expr(*a.value);
            break;
        case ActionKind::UpdateObjectWithNew:
            os << a.var << ", " << a.member << ", " << ocl::render_expr(*a.value);
            break;
        case ActionKind::AddOneToManyAssociation:
        case ActionKind::RemoveOneToManyAssociation:
        case ActionKind::AddOneToOneAssociation:
            os << a.var << ", " << a.member << ", " << ocl::render_expr(*a.value);
            break;
        case ActionKind::RemoveOneToOneAssociation:
            os << a.var << ", " << a.member;
            break;
    }
    os << ')';
    return os.str();
}

int effect_action_count(const std::vector<EffectItem>& items) {
    int n = 0;
    for (const EffectItem& item : items) {
        if (std::holds_alternative<AtomicAction>(item)) {
            ++n;
        } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
            n += static_cast<int>(cond->condition_actions.size());
            n += effect_action_count(cond->then_items);
            n += effect_action_count(cond->else_items);
        } else {
            n += effect_action_count(std::get<EffectLet>(item).items);
        }
    }
    return n;
}

void flatten_effects(const std::vector<EffectItem>& items, std::vector<const AtomicAction*>& out) {
    for (const EffectItem& item : items) {
        if (const auto* a = std::get_if<AtomicAction>(&item)) {
            out.push_back(a);
        } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
            for (const AtomicAction& c : cond->condition_actions) out.push_back(&c);
            flatten_effects(cond->then_items, out);
            flatten_effects(cond->else_items, out);
        } else {
            flatten_effects(std::get<EffectLet>(item).items, out);
        }
    }
}

namespace {

int consumed_in_effects(const std::vector<EffectItem>& items) {
    int n = 0;
    for (const EffectItem& item : items) {
        if (const auto* a = std::get_if<AtomicAction>(&item)) {
            n += a->consumed_clauses;
        } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
            for (const AtomicAction& c : cond->condition_actions) n += c.consumed_clauses;
            n += consumed_in_effects(cond->then_items);
            n += consumed_in_effects(cond->else_items);
        } else {
            n += consumed_in_effects(std::get<EffectLet>(item).items);
        }
    }
    return n;
}

} // namespace

int ClassifiedContract::total_actions() const {
    return static_cast<int>(definition_actions.size()) +
           static_cast<int>(guard_actions.size()) + effect_action_count(effects);
}

int ClassifiedContract::consumed_clause_total() const {
    int n = folded_pre_clauses + (result_expr ? 1 : 0);
    for (const AtomicAction& a : definition_actions) n += a.consumed_clauses;
    for (const AtomicAction& a : guard_actions) n += a.consumed_clauses;
    n += consumed_in_effects(effects);
    return n;
}

// ----------------------------------------------------------------- helpers ---

namespace {

using ocl::Expr;

const ocl::VarRef* as_var(const Expr& e) { return ocl::as<ocl::VarRef>(e); }

// Navigation of the form v.member (one step from a variable).
const ocl::Nav* as_var_nav(const Expr& e, std::string* var_out = nullptr) {
    const auto* nav = ocl::as<ocl::Nav>(e);
    if (!nav) return nullptr;
    const auto* var = as_var(*nav->source);
    if (!var) return nullptr;
    if (var_out) *var_out = var->name;
    return nav;
}

bool contains_node(const Expr& e, const std::function<bool(const Expr&)>& pred) {
    if (pred(e)) return true;
    bool found = false;
    auto walk = [&](const ocl::ExprPtr& p) {
        if (p && !found) found = contains_node(*p, pred);
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ocl::Nav>) {
                walk(n.source);
            } else if constexpr (std::is_same_v<T, ocl::Iter>) {
                walk(n.source);
                walk(n.body);
            } else if constexpr (std::is_same_v<T, ocl::CollectionOp>) {
                walk(n.source);
                walk(n.arg);
            } else if constexpr (std::is_same_v<T, ocl::StandardOp>) {
                walk(n.source);
            } else if constexpr (std::is_same_v<T, ocl::Compare>) {
                walk(n.lhs);
                walk(n.rhs);
            } else if constexpr (std::is_same_v<T, ocl::Arith>) {
                walk(n.lhs);
                walk(n.rhs);
            } else if constexpr (std::is_same_v<T, ocl::BoolBin>) {
                walk(n.lhs);
                walk(n.rhs);
            } else if constexpr (std::is_same_v<T, ocl::NotExpr>) {
                walk(n.operand);
            } else if constexpr (std::is_same_v<T, ocl::IfExpr>) {
                walk(n.cond);
                walk(n.then_branch);
                walk(n.else_branch);
            } else if constexpr (std::is_same_v<T, ocl::LetExpr>) {
                for (const auto& b : n.bindings) walk(b.value);
                walk(n.body);
            }
        },
        e.node);
    return found;
}

bool references_var(const Expr& e, const std::string& name) {
    return contains_node(e, [&](const Expr& x) {
        const auto* v = as_var(x);
        return v && v->name == name;
    });
}

bool contains_iteration(const Expr& e) {
    return contains_node(e, [](const Expr& x) { return ocl::as<ocl::Iter>(x) != nullptr; });
}

// Left-assoc and-chains flattened in source order.
void and_conjuncts(const Expr& e, std::vector<const Expr*>& out) {
    const auto* bin = ocl::as<ocl::BoolBin>(e);
    if (bin && bin->op == ocl::BoolKind::And) {
        and_conjuncts(*bin->lhs, out);
        and_conjuncts(*bin->rhs, out);
        return;
    }
    out.push_back(&e);
}

bool is_true_literal(const Expr& e) {
    const auto* lit = ocl::as<ocl::BoolLit>(e);
    return lit && lit->value;
}

// E.allInstances()->includes(v) / ->excludes(v)
bool is_all_instances_membership(const Expr& e, ocl::CollOp which, std::string* entity,
                                 std::string* var) {
    const auto* coll = ocl::as<ocl::CollectionOp>(e);
    if (!coll || coll->op != which || !coll->arg) return false;
    const auto* all = ocl::as<ocl::AllInstances>(*coll->source);
    const auto* v = coll->arg ? as_var(*coll->arg) : nullptr;
    if (!all || !v) return false;
    if (entity) *entity = all->entity;
    if (var) *var = v->name;
    return true;
}

// v.oclIsNew()
bool is_ocl_is_new(const Expr& e, std::string* var) {
    const auto* op = ocl::as<ocl::StandardOp>(e);
    if (!op || op->op != ocl::StdOp::OclIsNew) return false;
    const auto* v = as_var(*op->source);
    if (!v) return false;
    if (var) *var = v->name;
    return true;
}

const std::string* created_entity(const model::ContractDecl& c, const std::string& var) {
    for (const auto& [name, entity] : c.created_vars) {
        if (name == var) return &entity;
    }
    return nullptr;
}

std::string clause_text(const Expr& e) { return ocl::render_expr(e); }

// ------------------------------------------------------------- definitions ---

bool classify_iter_definition(const model::DefinitionBinding& binding, const ocl::Iter& iter,
                              AtomicAction& out, Diagnostics& diags) {
    const auto* all = ocl::as<ocl::AllInstances>(*iter.source);
    if (!all) {
        diags.add(Code::UnclassifiableDefinition, binding.span,
                  "definition '" + binding.name +
                      "' must iterate over Entity.allInstances()");
        return false;
    }
    out.kind = iter.kind == ocl::IterKind::Any ? ActionKind::FindObject : ActionKind::FindObjects;
    out.entity = all->entity;

    std::vector<const Expr*> body;
    and_conjuncts(*iter.body, body);
    for (const Expr* clause : body) {
        if (is_true_literal(*clause)) continue;
        const auto* cmp = ocl::as<ocl::Compare>(*clause);
        if (!cmp) {
            diags.add(Code::UnclassifiableDefinition, clause->span,
                      "find condition must be a comparison: " + clause_text(*clause));
            return false;
        }
        std::string var;
        const ocl::Nav* nav = as_var_nav(*cmp->lhs, &var);
        if (!nav || var != iter.var || nav->at_pre) {
            diags.add(Code::UnclassifiableDefinition, clause->span,
                      "find condition must compare an attribute of '" + iter.var +
                          "': " + clause_text(*clause));
            return false;
        }
        if (references_var(*cmp->rhs, iter.var)) {
            diags.add(Code::UnclassifiableDefinition, clause->span,
                      "find condition value must not reference the iterator variable");
            return false;
        }
        if (contains_iteration(*cmp->rhs)) {
            diags.add(Code::UnclassifiableDefinition, clause->span,
                      "nested iteration in find condition value");
            return false;
        }
        out.conditions.push_back(FindCondition{nav->member, cmp->op, cmp->rhs.get(), clause->span});
    }
    return true;
}

} // namespace

bool classify_definition(const model::DefinitionBinding& binding,
                         const model::RequirementModel& m, AtomicAction& out, Diagnostics& diags) {
    (void)m;
    out = AtomicAction{};
    out.section = Section::Definition;
    out.span = binding.span;
    out.var = binding.name;
    out.consumed_clauses = 1;

    const Expr& e = *binding.expr;
    if (const auto* iter = ocl::as<ocl::Iter>(e)) {
        return classify_iter_definition(binding, *iter, out, diags);
    }
    std::string src_var;
    if (const ocl::Nav* nav = as_var_nav(e, &src_var); nav && nav->is_assoc) {
        out.kind = nav->mult == Mult::One ? ActionKind::FindAssociationObject
                                          : ActionKind::FindAssociationObjects;
        out.entity_var = src_var;
        out.member = nav->member;
        out.entity = e.type.name;
        return true;
    }
    diags.add(Code::UnclassifiableDefinition, binding.span,
              "definition '" + binding.name +
                  "' must be an any/select over allInstances or an association navigation");
    return false;
}

// ------------------------------------------------------------------ guards ---

namespace {

struct GuardBuilder {
    const model::ContractDecl& contract;
    const model::RequirementModel& m;
    std::vector<AtomicAction>& actions;
    int* folded = nullptr; // non-null only for the main precondition
    Diagnostics& diags;
    bool ok = true;

    GuardTree build(const Expr& e) {
        if (is_true_literal(e)) return GuardTree{GuardTree::Kind::True, 0, {}};
        if (const auto* bin = ocl::as<ocl::BoolBin>(e)) {
            GuardTree node;
            node.kind = bin->op == ocl::BoolKind::And ? GuardTree::Kind::And : GuardTree::Kind::Or;
            collect(e, bin->op, node.children);
            // fold-only children (created-object excludes rows) may leave gaps
            std::erase_if(node.children,
                          [](const GuardTree& t) { return t.kind == GuardTree::Kind::True; });
            if (node.children.empty()) return GuardTree{GuardTree::Kind::True, 0, {}};
            if (node.children.size() == 1) return std::move(node.children.front());
            return node;
        }
        if (const auto* inv = ocl::as<ocl::NotExpr>(e)) {
            GuardTree node;
            node.kind = GuardTree::Kind::Not;
            node.children.push_back(build(*inv->operand));
            return node;
        }
        if (const auto* ife = ocl::as<ocl::IfExpr>(e)) {
            GuardTree node;
            node.kind = GuardTree::Kind::If;
            node.children.push_back(build(*ife->cond));
            node.children.push_back(build(*ife->then_branch));
            node.children.push_back(build(*ife->else_branch));
            return node;
        }
        return leaf(e);
    }

    void collect(const Expr& e, ocl::BoolKind op, std::vector<GuardTree>& out) {
        const auto* bin = ocl::as<ocl::BoolBin>(e);
        if (bin && bin->op == op) {
            collect(*bin->lhs, op, out);
            collect(*bin->rhs, op, out);
            return;
        }
        out.push_back(build(e));
    }

    GuardTree leaf(const Expr& e) {
        // CreateObject's optional precondition row folds away.
        std::string entity, var;
        if (folded && is_all_instances_membership(e, ocl::CollOp::Excludes, &entity, &var)) {
            if (const std::string* created = created_entity(contract, var);
                created && *created == entity) {
                ++*folded;
                return GuardTree{GuardTree::Kind::True, 0, {}};
            }
        }

        AtomicAction a;
        a.section = Section::Precondition;
        a.span = e.span;
        if (!classify_leaf(e, a)) {
            ok = false;
            return GuardTree{GuardTree::Kind::True, 0, {}};
        }
        GuardTree node;
        node.kind = GuardTree::Kind::Leaf;
        node.leaf = actions.size();
        actions.push_back(std::move(a));
        return node;
    }

    bool classify_leaf(const Expr& e, AtomicAction& a) {
        if (const auto* cmp = ocl::as<ocl::Compare>(e)) {
            return classify_compare_leaf(e, *cmp, a);
        }
        if (const auto* std_op = ocl::as<ocl::StandardOp>(e)) {
            const auto* v = as_var(*std_op->source);
            if (!v) {
                diags.add(Code::UnclassifiablePrecondition, e.span,
                          "standard operation must apply to a variable: " + clause_text(e));
                return false;
            }
            a.kind = ActionKind::StandardOperationToObject;
            a.var = v->name;
            a.member = ocl::std_op_text(std_op->op);
            return true;
        }
        if (const auto* coll = ocl::as<ocl::CollectionOp>(e)) {
            if (e.type.kind != StaticType::Kind::Boolean) {
                diags.add(Code::UnclassifiablePrecondition, e.span,
                          "guard clause is not boolean: " + clause_text(e));
                return false;
            }
            if (!collection_operand_ok(*coll->source)) {
                diags.add(Code::UnclassifiablePrecondition, e.span,
                          "collection guard must apply to a bound set or a direct association: " +
                              clause_text(e));
                return false;
            }
            a.kind = ActionKind::StandardOperationToObjects;
            a.source = coll->source.get();
            a.member = ocl::coll_op_text(coll->op);
            a.value2 = coll->arg.get();
            return true;
        }
        diags.add(Code::UnclassifiablePrecondition, e.span,
                  "guard clause fits no translation rule: " + clause_text(e));
        return false;
    }

    bool collection_operand_ok(const Expr& source) {
        if (as_var(source)) return true;
        std::string var;
        const ocl::Nav* nav = as_var_nav(source, &var);
        return nav && nav->is_assoc && nav->mult == Mult::Many;
    }

    bool classify_compare_leaf(const Expr& e, const ocl::Compare& cmp, AtomicAction& a) {
        std::string var;
        if (const ocl::Nav* nav = as_var_nav(*cmp.lhs, &var)) {
            a.kind = ActionKind::CheckAttributeState;
            a.var = var;
            a.member = nav->member;
            a.at_pre = nav->at_pre;
            a.op = cmp.op;
            a.value = cmp.rhs.get();
            return true;
        }
        if (const auto* std_op = ocl::as<ocl::StandardOp>(*cmp.lhs)) {
            const auto* v = as_var(*std_op->source);
            if (!v) {
                diags.add(Code::UnclassifiablePrecondition, e.span,
                          "object state check must apply to a variable: " + clause_text(e));
                return false;
            }
            a.kind = ActionKind::CheckObjectState;
            a.var = v->name;
            a.member = ocl::std_op_text(std_op->op);
            a.op = cmp.op;
            a.value = cmp.rhs.get();
            return true;
        }
        if (const auto* coll = ocl::as<ocl::CollectionOp>(*cmp.lhs)) {
            if (!collection_operand_ok(*coll->source)) {
                diags.add(Code::UnclassifiablePrecondition, e.span,
                          "collection guard must apply to a bound set or a direct association: " +
                              clause_text(e));
                return false;
            }
            a.kind = ActionKind::CheckCollectionState;
            a.source = coll->source.get();
            a.member = ocl::coll_op_text(coll->op);
            a.value2 = coll->arg.get();
            a.op = cmp.op;
            a.value = cmp.rhs.get();
            return true;
        }
        diags.add(Code::UnclassifiablePrecondition, e.span,
                  "guard comparison must check an attribute, object or collection state: " +
                      clause_text(e));
        return false;
    }
};

} // namespace

bool classify_precondition(const Expr& pre, const model::ContractDecl& c,
                           const model::RequirementModel& m, GuardTree& tree,
                           std::vector<AtomicAction>& actions, int& folded_clauses,
                           Diagnostics& diags) {
    folded_clauses = 0;
    GuardBuilder builder{c, m, actions, &folded_clauses, diags};
    tree = builder.build(pre);
    return builder.ok;
}

// ------------------------------------------------------------------- posts ---

namespace {

struct PostClassifier {
    const model::ContractDecl& contract;
    const model::RequirementModel& m;
    Diagnostics& diags;
    const Expr* result_expr = nullptr;
    bool ok = true;

    std::vector<EffectItem> classify_list(const std::vector<const Expr*>& conjuncts,
                                          bool top_level) {
        std::vector<EffectItem> items;
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            const Expr& e = *conjuncts[i];
            if (is_true_literal(e)) continue;

            // result designation
            if (const auto* cmp = ocl::as<ocl::Compare>(e)) {
                const auto* v = as_var(*cmp->lhs);
                if (v && v->name == "result") {
                    if (cmp->op != ocl::CmpOp::Eq) {
                        fail(e, "result designation must use '='");
                        continue;
                    }
                    if (!top_level) {
                        fail(e, "result designation must be an unconditional conjunct");
                        continue;
                    }
                    if (result_expr) {
                        fail(e, "duplicate result designation");
                        continue;
                    }
                    result_expr = cmp->rhs.get();
                    continue;
                }
            }

            // creation pair, canonical order: v.oclIsNew() [and E.allInstances()->includes(v)]
            std::string var, entity;
            if (is_ocl_is_new(e, &var)) {
                const std::string* created = created_entity(contract, var);
                if (!created) {
                    // already-bound variables cannot be created
                    if (e.type.kind == StaticType::Kind::Invalid) {
                        fail(e, "oclIsNew target '" + var + "' has no known entity");
                        continue;
                    }
                }
                AtomicAction a;
                a.kind = ActionKind::CreateObject;
                a.section = Section::Postcondition;
                a.span = e.span;
                a.var = var;
                a.entity = created ? *created : lookup_entity_of(var);
                if (a.entity.empty()) {
                    fail(e, "oclIsNew applies to a created variable; add E.allInstances()->includes(" +
                                var + ")");
                    continue;
                }
                std::string next_entity, next_var;
                if (i + 1 < conjuncts.size() &&
                    is_all_instances_membership(*conjuncts[i + 1], ocl::CollOp::Includes,
                                                &next_entity, &next_var) &&
                    next_var == var && next_entity == a.entity) {
                    a.consumed_clauses = 2;
                    ++i;
                }
                items.emplace_back(std::move(a));
                continue;
            }
            // creation pair, reversed order
            if (is_all_instances_membership(e, ocl::CollOp::Includes, &entity, &var)) {
                std::string next_var;
                if (i + 1 < conjuncts.size() && is_ocl_is_new(*conjuncts[i + 1], &next_var) &&
                    next_var == var) {
                    const std::string* created = created_entity(contract, var);
                    if (!created || *created != entity) {
                        fail(e, "creation companion does not match a created variable");
                        continue;
                    }
                    AtomicAction a;
                    a.kind = ActionKind::CreateObject;
                    a.section = Section::Postcondition;
                    a.span = e.span;
                    a.var = var;
                    a.entity = entity;
                    a.consumed_clauses = 2;
                    ++i;
                    items.emplace_back(std::move(a));
                    continue;
                }
                fail(e, "allInstances()->includes must accompany an adjacent oclIsNew");
                continue;
            }
            // release companion, reversed order: E.allInstances()->excludes(v) first
            if (is_all_instances_membership(e, ocl::CollOp::Excludes, &entity, &var)) {
                if (i + 1 < conjuncts.size()) {
                    AtomicAction a;
                    if (match_release(*conjuncts[i + 1], a) && a.var == var && a.entity == entity) {
                        a.consumed_clauses = 2;
                        ++i;
                        items.emplace_back(std::move(a));
                        continue;
                    }
                }
                fail(e, "allInstances()->excludes must accompany an adjacent oclIsUndefined = true");
                continue;
            }
            {
                AtomicAction a;
                if (match_release(e, a)) {
                    std::string next_entity, next_var;
                    if (i + 1 < conjuncts.size() &&
                        is_all_instances_membership(*conjuncts[i + 1], ocl::CollOp::Excludes,
                                                    &next_entity, &next_var) &&
                        next_var == a.var && next_entity == a.entity) {
                        a.consumed_clauses = 2;
                        ++i;
                    }
                    items.emplace_back(std::move(a));
                    continue;
                }
            }

            if (std::optional<EffectItem> item = classify_single(e)) {
                items.push_back(std::move(*item));
            }
        }
        return items;
    }

    // ob.oclIsUndefined() = true with ob a variable -> ReleaseObject;
    // ob.asso.oclIsUndefined() = true -> RemoveOneToOneAssociation.
    bool match_release(const Expr& e, AtomicAction& a) {
        const auto* cmp = ocl::as<ocl::Compare>(e);
        if (!cmp || cmp->op != ocl::CmpOp::Eq) return false;
        const auto* lit = ocl::as<ocl::BoolLit>(*cmp->rhs);
        if (!lit || !lit->value) return false;
        const auto* std_op = ocl::as<ocl::StandardOp>(*cmp->lhs);
        if (!std_op || std_op->op != ocl::StdOp::OclIsUndefined) return false;
        if (const auto* v = as_var(*std_op->source)) {
            a.kind = ActionKind::ReleaseObject;
            a.section = Section::Postcondition;
            a.span = e.span;
            a.var = v->name;
            a.entity = std_op->source->type.name;
            return true;
        }
        std::string var;
        if (const ocl::Nav* nav = as_var_nav(*std_op->source, &var);
            nav && nav->is_assoc && nav->mult == Mult::One && !nav->at_pre) {
            a.kind = ActionKind::RemoveOneToOneAssociation;
            a.section = Section::Postcondition;
            a.span = e.span;
            a.var = var;
            a.member = nav->member;
            return true;
        }
        return false;
    }

    std::string lookup_entity_of(const std::string& var) const {
        if (const std::string* created = created_entity(contract, var)) return *created;
        return {};
    }

    void fail(const Expr& e, const std::string& msg) {
        diags.add(Code::UnclassifiablePostcondition, e.span, msg);
        ok = false;
    }

    void fail_equation(const Expr& e) {
        diags.add(Code::EquationFormError, e.span,
                  "postcondition clause '" + clause_text(e) +
                      "' is a general equation and cannot be translated; explicitly show how to "
                      "update this object");
        ok = false;
    }

    // One effect conjunct; empty after emitting a diagnostic.
    std::optional<EffectItem> classify_single(const Expr& e) {
        if (const auto* ife = ocl::as<ocl::IfExpr>(e)) {
            EffectConditional cond;
            cond.span = e.span;
            GuardBuilder builder{contract, m, cond.condition_actions, nullptr, diags};
            cond.condition = builder.build(*ife->cond);
            if (!builder.ok) {
                ok = false;
                return std::nullopt;
            }
            std::vector<const Expr*> then_conjuncts, else_conjuncts;
            and_conjuncts(*ife->then_branch, then_conjuncts);
            and_conjuncts(*ife->else_branch, else_conjuncts);
            cond.then_items = classify_list(then_conjuncts, false);
            cond.else_items = classify_list(else_conjuncts, false);
            if (!ok) return std::nullopt;
            return EffectItem(std::move(cond));
        }
        if (const auto* let = ocl::as<ocl::LetExpr>(e)) {
            EffectLet out;
            out.span = e.span;
            for (const ocl::LetBinding& b : let->bindings) {
                out.bindings.emplace_back(b.name, b.value.get());
            }
            std::vector<const Expr*> body;
            and_conjuncts(*let->body, body);
            out.items = classify_list(body, false);
            if (!ok) return std::nullopt;
            return EffectItem(std::move(out));
        }
        if (ocl::as<ocl::BoolBin>(e)) {
            fail(e, "disjunctive postcondition clause: " + clause_text(e));
            return std::nullopt;
        }

        const auto* cmp = ocl::as<ocl::Compare>(e);
        if (!cmp) {
            // membership effects: ob.asso->includes/excludes(x)
            if (const auto* coll = ocl::as<ocl::CollectionOp>(e)) {
                std::string var;
                const ocl::Nav* nav = as_var_nav(*coll->source, &var);
                if (nav && nav->is_assoc && nav->mult == Mult::Many && coll->arg &&
                    (coll->op == ocl::CollOp::Includes || coll->op == ocl::CollOp::Excludes)) {
                    AtomicAction a;
                    a.kind = coll->op == ocl::CollOp::Includes
                                 ? ActionKind::AddOneToManyAssociation
                                 : ActionKind::RemoveOneToManyAssociation;
                    a.section = Section::Postcondition;
                    a.span = e.span;
                    a.var = var;
                    a.member = nav->member;
                    a.value = coll->arg.get();
                    return EffectItem(std::move(a));
                }
            }
            fail(e, "postcondition clause fits no translation rule: " + clause_text(e));
            return std::nullopt;
        }
        if (cmp->op != ocl::CmpOp::Eq) {
            fail(e, "postconditions state effects with '=': " + clause_text(e));
            return std::nullopt;
        }

        std::string var;
        const ocl::Nav* nav = as_var_nav(*cmp->lhs, &var);
        if (!nav) {
            // left side is not a navigation: a general equation (e.g. x.a + y.b = 10)
            fail_equation(e);
            return std::nullopt;
        }
        if (nav->at_pre) {
            fail(e, "cannot state an update of the pre-state: " + clause_text(e));
            return std::nullopt;
        }
        if (nav->is_assoc) {
            if (nav->mult != Mult::One) {
                fail(e, "many-valued association updated with '='; use ->includes/->excludes");
                return std::nullopt;
            }
            AtomicAction a;
            a.kind = ActionKind::AddOneToOneAssociation;
            a.section = Section::Postcondition;
            a.span = e.span;
            a.var = var;
            a.member = nav->member;
            a.value = cmp->rhs.get();
            return EffectItem(std::move(a));
        }

        // attribute update: ob.attri = ob.attri@pre op value | ob.attri = value
        if (const auto* arith = ocl::as<ocl::Arith>(*cmp->rhs)) {
            std::string pre_var;
            const ocl::Nav* pre_nav = as_var_nav(*arith->lhs, &pre_var);
            if (pre_nav && pre_nav->at_pre && pre_var == var && pre_nav->member == nav->member) {
                AtomicAction a;
                a.kind = ActionKind::UpdateObject;
                a.section = Section::Postcondition;
                a.span = e.span;
                a.var = var;
                a.member = nav->member;
                a.arith_op = arith->op;
                a.value = arith->rhs.get();
                return EffectItem(std::move(a));
            }
        }
        const bool same_attr_pre = contains_node(*cmp->rhs, [&](const Expr& x) {
            std::string v;
            const ocl::Nav* n = as_var_nav(x, &v);
            return n && n->at_pre && v == var && n->member == nav->member;
        });
        if (same_attr_pre) {
            // depends on the previous state but not in the updateObject form
            fail_equation(e);
            return std::nullopt;
        }
        AtomicAction a;
        a.kind = ActionKind::UpdateObjectWithNew;
        a.section = Section::Postcondition;
        a.span = e.span;
        a.var = var;
        a.member = nav->member;
        a.value = cmp->rhs.get();
        return EffectItem(std::move(a));
    }
};

// Creation-before-reference: hoist each CreateObject before the first item in
// the same list that references its variable.
bool item_references_var(const EffectItem& item, const std::string& var);

bool action_references_var(const AtomicAction& a, const std::string& var) {
    if (a.var == var || a.entity_var == var) return true;
    if (a.value && references_var(*a.value, var)) return true;
    if (a.value2 && references_var(*a.value2, var)) return true;
    if (a.source && references_var(*a.source, var)) return true;
    for (const FindCondition& c : a.conditions) {
        if (c.value && references_var(*c.value, var)) return true;
    }
    return false;
}

bool item_references_var(const EffectItem& item, const std::string& var) {
    if (const auto* a = std::get_if<AtomicAction>(&item)) {
        return action_references_var(*a, var);
    }
    if (const auto* cond = std::get_if<EffectConditional>(&item)) {
        for (const AtomicAction& a : cond->condition_actions) {
            if (action_references_var(a, var)) return true;
        }
        for (const EffectItem& it : cond->then_items) {
            if (item_references_var(it, var)) return true;
        }
        for (const EffectItem& it : cond->else_items) {
            if (item_references_var(it, var)) return true;
        }
        return false;
    }
    const auto& let = std::get<EffectLet>(item);
    for (const auto& [name, value] : let.bindings) {
        if (value && references_var(*value, var)) return true;
    }
    for (const EffectItem& it : let.items) {
        if (item_references_var(it, var)) return true;
    }
    return false;
}

void hoist_creations(std::vector<EffectItem>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto* a = std::get_if<AtomicAction>(&items[i]);
        if (!a || a->kind != ActionKind::CreateObject) {
            if (auto* cond = std::get_if<EffectConditional>(&items[i])) {
                hoist_creations(cond->then_items);
                hoist_creations(cond->else_items);
            } else if (auto* let = std::get_if<EffectLet>(&items[i])) {
                hoist_creations(let->items);
            }
            continue;
        }
        const std::string var = a->var;
        for (std::size_t j = 0; j < i; ++j) {
            if (item_references_var(items[j], var)) {
                EffectItem create = std::move(items[i]);
                items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
                items.insert(items.begin() + static_cast<std::ptrdiff_t>(j), std::move(create));
                break;
            }
        }
    }
}

} // namespace

bool classify_postcondition(const Expr& post, const model::ContractDecl& c,
                            const model::RequirementModel& m, std::vector<EffectItem>& effects,
                            const ocl::Expr** result_expr, Diagnostics& diags) {
    PostClassifier classifier{c, m, diags};
    std::vector<const Expr*> conjuncts;
    and_conjuncts(post, conjuncts);
    effects = classifier.classify_list(conjuncts, true);
    if (!classifier.ok) return false;

    const bool needs_result = c.output.kind != StaticType::Kind::Boolean &&
                              c.output.kind != StaticType::Kind::Invalid;
    if (needs_result && !classifier.result_expr) {
        diags.add(Code::UnclassifiablePostcondition, post.span,
                  "operation '" + c.operation +
                      "' returns a value; designate it with 'result = ...'");
        return false;
    }
    if (!needs_result && classifier.result_expr) {
        diags.add(Code::UnclassifiablePostcondition, post.span,
                  "Boolean operation '" + c.operation + "' returns true implicitly");
        return false;
    }
    hoist_creations(effects);
    if (result_expr) *result_expr = classifier.result_expr;
    return true;
}

std::unique_ptr<ClassifiedContract> classify_contract(const model::ContractDecl& contract,
                                                      const model::RequirementModel& m,
                                                      Diagnostics& diags) {
    auto out = std::make_unique<ClassifiedContract>();
    out->contract = &contract;
    bool ok = true;
    for (const model::DefinitionBinding& b : contract.definitions) {
        AtomicAction a;
        if (classify_definition(b, m, a, diags)) {
            out->definition_actions.push_back(std::move(a));
        } else {
            ok = false;
        }
    }
    if (!classify_postcondition(*contract.postcondition, contract, m, out->effects,
                                &out->result_expr, diags)) {
        ok = false;
    }
    if (!classify_precondition(*contract.precondition, contract, m, out->guard,
                               out->guard_actions, out->folded_pre_clauses, diags)) {
        ok = false;
    }
    if (!ok) return nullptr;
    return out;
}

} // namespace rmc::actions
