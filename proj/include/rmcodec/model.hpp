#pragma once

#include "rmcodec/diagnostics.hpp"
#include "rmcodec/ocl_ast.hpp"
#include "rmcodec/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rmc::model {

struct AttributeDecl {
    std::string name;
    StaticType type; // Boolean/Integer/Real/String/Date/Enum
    Span span;
};

// One navigable end of an association. Associations are declared on a single
// side; the resolver materializes the opposite end on the target entity
// (declared = false) so both directions can be navigated and stored.
struct AssociationEnd {
    std::string name;
    std::string target;  // entity holding the linked object(s)
    Mult mult = Mult::One;
    std::string inverse; // name of the opposite end
    Mult inverse_mult = Mult::One;
    bool declared = true;
    Span span;
};

struct EntityDecl {
    std::string name;
    std::vector<AttributeDecl> attributes;
    std::vector<AssociationEnd> ends;
    Span span;

    const AttributeDecl* attribute(const std::string& n) const;
    const AssociationEnd* end(const std::string& n) const;
};

struct EnumDecl {
    std::string name;
    std::vector<std::string> literals;
    Span span;

    bool has_literal(const std::string& lit) const;
};

struct UseCaseDecl {
    std::string name;
    Span span;
};

struct ActorDecl {
    std::string name;
    std::vector<UseCaseDecl> usecases;
    Span span;
};

struct OperationRef {
    std::string name;
    Span span;
};

struct ServiceDecl {
    std::string name;
    std::vector<OperationRef> operations;
    Span span;
};

struct ParamDecl {
    std::string name;
    StaticType type;
    Span span;
};

struct DefinitionBinding {
    std::string name;
    ocl::ExprPtr expr;
    Span span;
};

struct ContractDecl {
    std::string operation;
    std::string service; // resolved owner
    std::vector<ParamDecl> inputs;
    StaticType output;
    std::vector<DefinitionBinding> definitions;
    ocl::ExprPtr precondition;
    ocl::ExprPtr postcondition;
    // Variables created by the postcondition (bound via the
    // `E.allInstances()->includes(v)` companion), in discovery order.
    std::vector<std::pair<std::string, std::string>> created_vars;
    Span span;
};

struct RequirementModel {
    std::vector<EnumDecl> enums;
    std::vector<EntityDecl> entities;
    std::vector<ActorDecl> actors;
    std::vector<ServiceDecl> services;
    std::vector<ContractDecl> contracts;

    const EntityDecl* entity(const std::string& name) const;
    const EnumDecl* enumeration(const std::string& name) const;
    const ContractDecl* contract_for(const std::string& operation) const;
    const ServiceDecl* service(const std::string& name) const;
};

// Parses one source unit and resolves it. On any error-severity diagnostic the
// returned pointer is null. Parsing is deterministic: identical bytes yield a
// structurally identical model.
std::unique_ptr<RequirementModel> parse_model(std::string_view source, const std::string& origin,
                                              Diagnostics& diags);

// Multi-file variant: units are concatenated in argument order, then resolved
// as one model (the CLI merges `--model` files this way).
std::unique_ptr<RequirementModel> parse_model_files(
    const std::vector<std::pair<std::string, std::string>>& sources, // (origin, text)
    Diagnostics& diags);

// Re-checks every structural invariant of an already-built model. Empty result
// means the model is well formed. parse_model runs the same checks, so a model
// it returns always validates cleanly.
std::vector<Diagnostic> validate_model(const RequirementModel& model);

// Canonical source form; parse(pretty_print(m)) is structurally equal to m.
std::string pretty_print(const RequirementModel& model);

// Structural equality ignoring spans.
bool model_equal(const RequirementModel& a, const RequirementModel& b);

} // namespace rmc::model
