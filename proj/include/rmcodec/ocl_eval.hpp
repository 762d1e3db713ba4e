#pragma once

#include "rmcodec/ocl_ast.hpp"
#include "rmcodec/store.hpp"
#include "rmcodec/value.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace rmc::ocl {

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Test hook: called once per node actually evaluated. Lets tests observe
// short-circuiting without touching the evaluator.
struct EvalHooks {
    std::function<void(const Expr&)> on_eval;
};

using Bindings = std::map<std::string, Value>;

// Strict two-state evaluation. `@pre`-marked navigations and oclIsNew read
// `pre`; everything else reads `post`. For precondition evaluation pass the
// same store for both. Never mutates either store.
//
// Semantics of undefined: navigation from undefined yields undefined; any
// comparison with an undefined operand is false; oclIsUndefined(undefined) is
// true; undefined in a boolean position is false; and/or short-circuit left
// to right.
Value evaluate(const Expr& expr, const rt::EntityStore& pre, const rt::EntityStore& post,
               const Bindings& bindings, const EvalHooks* hooks = nullptr);

} // namespace rmc::ocl
