#pragma once

#include "rmcodec/actions.hpp"
#include "rmcodec/model.hpp"
#include "rmcodec/store.hpp"

#include <memory>
#include <string>
#include <vector>

namespace rmc::logic {

struct Signature {
    std::string operation;
    std::vector<model::ParamDecl> inputs;
    StaticType output;
};

// The else-branch of the generated skeleton: raised when the guard is false.
struct FailureDescriptor {
    std::string operation;
    std::string exception_name = "PreconditionIsNotSatisfied";
};

// Executable unit for one operation contract, laid out in generation order:
// signature, definition block, guard skeleton, effect block, failure path.
struct BusinessLogicUnit {
    Signature signature;
    std::vector<actions::AtomicAction> definition_block;
    actions::GuardTree guard;
    std::vector<actions::AtomicAction> guard_actions;
    std::vector<actions::EffectItem> effect_block;
    const ocl::Expr* result_expr = nullptr;
    FailureDescriptor failure;
    const model::ContractDecl* contract = nullptr;
    double gen_ms = 0.0; // single-shot generation time, informational
};

struct ServiceUnit {
    std::string name;
    std::vector<BusinessLogicUnit> units;
};

struct ApplicationUnit {
    // Persistence schema handed to the runtime.
    std::vector<model::EntityDecl> entities;
    std::vector<model::EnumDecl> enums;
    rt::SchemaPtr schema;
    std::vector<ServiceUnit> services;

    const BusinessLogicUnit* unit_for(const std::string& operation) const;
    std::size_t unit_count() const;
};

// Assembles one classified contract into a unit and checks dataflow: every
// variable a guard or effect consumes must come from an input, a definition
// binding or a preceding creation.
std::unique_ptr<BusinessLogicUnit> generate_logic(const actions::ClassifiedContract& classified,
                                                  const model::ContractDecl& contract,
                                                  Diagnostics& diags);

// Whole-model assembly: persistence schema, then one unit per contract,
// arranged into services in model order. Continues past per-operation
// failures so the diagnostics cover every broken contract.
std::unique_ptr<ApplicationUnit> generate_application(const model::RequirementModel& m,
                                                      Diagnostics& diags);

// Stable IR text used by --emit-ir and the golden-file tests: one action per
// line, indented by block, order definition -> guard -> effects -> failure.
std::string render_ir(const BusinessLogicUnit& unit);
std::string render_ir(const ApplicationUnit& app);

} // namespace rmc::logic
