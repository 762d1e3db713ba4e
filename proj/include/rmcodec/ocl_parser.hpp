#pragma once

#include "rmcodec/diagnostics.hpp"
#include "rmcodec/lexer.hpp"
#include "rmcodec/model.hpp"
#include "rmcodec/ocl_ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace rmc::ocl {

// Expression context: precondition / definition expressions must be @pre- and
// oclIsNew-free; postconditions admit both.
enum class ExprContext { Definition, Precondition, Postcondition };

// Name environment for type checking. Entity and enum names come from the
// model; `vars` holds inputs, definition bindings, created variables, the
// ambient `today : Date` and (in postconditions) `result`.
struct TypeEnv {
    const model::RequirementModel* model = nullptr;
    std::map<std::string, StaticType> vars;

    const StaticType* lookup(const std::string& name) const;
};

// Syntax-only parse of a standalone expression source. Returns null on error.
ExprPtr parse_expression_syntax(std::string_view source, const std::string& origin,
                                Diagnostics& diags);

// Parse + type check against `env`. Returns null if any error was emitted.
ExprPtr parse_expression(std::string_view source, const std::string& origin, const TypeEnv& env,
                         ExprContext ctx, Diagnostics& diags);

// Type checks (and annotates) an already-parsed tree in place.
// Returns false and emits diagnostics on failure.
bool type_check(Expr& expr, const TypeEnv& env, ExprContext ctx, Diagnostics& diags);

// Token-stream expression parser used by the model parser; consumes tokens
// starting at `pos` and leaves `pos` after the expression.
ExprPtr parse_expression_tokens(const std::vector<Token>& tokens, std::size_t& pos,
                                Diagnostics& diags);

} // namespace rmc::ocl
