#pragma once

#include "rmcodec/diagnostics.hpp"
#include "rmcodec/model.hpp"
#include "rmcodec/ocl_ast.hpp"

#include <string>
#include <variant>
#include <vector>

namespace rmc::actions {

// The 17 CRUD atomic actions contract clauses translate into.
enum class ActionKind {
    CreateObject,
    AddOneToManyAssociation,
    AddOneToOneAssociation,
    FindObject,
    FindObjects,
    FindAssociationObject,
    FindAssociationObjects,
    StandardOperationToObject,
    StandardOperationToObjects,
    CheckAttributeState,
    CheckObjectState,
    CheckCollectionState,
    UpdateObject,
    UpdateObjectWithNew,
    ReleaseObject,
    RemoveOneToManyAssociation,
    RemoveOneToOneAssociation,
};

const char* action_kind_name(ActionKind k);

enum class Section { Definition, Precondition, Postcondition };

struct FindCondition {
    std::string attribute;
    ocl::CmpOp op = ocl::CmpOp::Eq;
    const ocl::Expr* value = nullptr;
    Span span;
};

// One classified clause. Field use per kind:
//   CreateObject                var (created), entity
//   Add/RemoveOneToMany         var (ob), member (asso), value (added/removed object expr)
//   AddOneToOne                 var (ob), member (asso), value (object expr)
//   RemoveOneToOne              var (ob), member (asso)
//   FindObject(s)               var (bound), entity, conditions
//   FindAssociationObject(s)    var (bound), member (asso) on source var in `entity_var`
//   StandardOperationToObject   var, member (oclIsNew/oclIsUndefined)
//   StandardOperationToObjects  var, member (collection op), value (arg, may be null)
//   CheckAttributeState         var, member (attri), op, value
//   CheckObjectState            var, member (stanop), op, value
//   CheckCollectionState        var, member (collection op), op, value, arg in `value2`
//   UpdateObject                var, member (attri), arith_op, value
//   UpdateObjectWithNew         var, member (attri), value
//   ReleaseObject               var, entity
struct AtomicAction {
    ActionKind kind;
    Section section = Section::Precondition;
    Span span;
    std::string var;
    std::string entity;
    std::string entity_var; // FindAssociationObject(s): the navigated-from variable
    std::string member;
    ocl::CmpOp op = ocl::CmpOp::Eq;
    ocl::ArithOp arith_op = ocl::ArithOp::Add;
    bool at_pre = false;                     // check reads the pre-state snapshot
    const ocl::Expr* value = nullptr;
    const ocl::Expr* value2 = nullptr;       // CheckCollectionState: includes/excludes argument
    const ocl::Expr* source = nullptr;       // collection operand for the set-valued kinds
    std::vector<FindCondition> conditions;
    // Source conjuncts this action absorbed (2 for folded create/release pairs).
    int consumed_clauses = 1;
};

// `kind(args...)` in a stable, documented form shared by --dump-actions,
// the IR dump and the listing emitter.
std::string render_action(const AtomicAction& a);

// Guard structure mirroring the precondition's and/or/not/if shape over
// guard-action leaf indices.
struct GuardTree {
    enum class Kind { True, Leaf, And, Or, Not, If };
    Kind kind = Kind::True;
    std::size_t leaf = 0;              // valid when kind == Leaf
    std::vector<GuardTree> children;   // And/Or: n-ary; Not: 1; If: cond, then, else
};

struct EffectConditional;
struct EffectLet;

using EffectItem = std::variant<AtomicAction, EffectConditional, EffectLet>;

// Branch-tagged effects from an if-then-else postcondition conjunct: the
// branch condition classifies like a guard, each branch holds effect items.
struct EffectConditional {
    GuardTree condition;
    std::vector<AtomicAction> condition_actions;
    std::vector<EffectItem> then_items;
    std::vector<EffectItem> else_items;
    Span span;
};

// A let-wrapped postcondition: bindings are pure values computed before the
// wrapped effects run.
struct EffectLet {
    std::vector<std::pair<std::string, const ocl::Expr*>> bindings;
    std::vector<EffectItem> items;
    Span span;
};

struct ClassifiedContract {
    const model::ContractDecl* contract = nullptr;
    std::vector<AtomicAction> definition_actions;
    GuardTree guard;
    std::vector<AtomicAction> guard_actions;
    std::vector<EffectItem> effects;
    const ocl::Expr* result_expr = nullptr; // output designation, null for Boolean units
    // Precondition conjuncts of the form E.allInstances()->excludes(v) for a
    // created v fold into the CreateObject action instead of guarding.
    int folded_pre_clauses = 0;

    // AA metric: definition + guard + effect actions (branch conditions and
    // branch bodies included).
    int total_actions() const;
    // Source conjuncts covered, including companions folded into one action
    // and the result designation; the clause-counting oracle checks this.
    int consumed_clause_total() const;
};

int effect_action_count(const std::vector<EffectItem>& items);
void flatten_effects(const std::vector<EffectItem>& items, std::vector<const AtomicAction*>& out);

// Table-rule classifiers. All are pure; failures surface as diagnostics and a
// null/empty return.
bool classify_definition(const model::DefinitionBinding& binding,
                         const model::RequirementModel& m, AtomicAction& out, Diagnostics& diags);

bool classify_precondition(const ocl::Expr& pre, const model::ContractDecl& c,
                           const model::RequirementModel& m, GuardTree& tree,
                           std::vector<AtomicAction>& actions, int& folded_clauses,
                           Diagnostics& diags);

bool classify_postcondition(const ocl::Expr& post, const model::ContractDecl& c,
                            const model::RequirementModel& m, std::vector<EffectItem>& effects,
                            const ocl::Expr** result_expr, Diagnostics& diags);

// Composes the three classifiers and applies the creation-before-reference
// reordering. Null on any classification error.
std::unique_ptr<ClassifiedContract> classify_contract(const model::ContractDecl& contract,
                                                      const model::RequirementModel& m,
                                                      Diagnostics& diags);

} // namespace rmc::actions
