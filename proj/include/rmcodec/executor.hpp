#pragma once

#include "rmcodec/logic.hpp"
#include "rmcodec/ocl_eval.hpp"
#include "rmcodec/store.hpp"
#include "rmcodec/value.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>

namespace rmc::rt {

struct Success {
    Value result;
};

struct PreconditionFailure {
    std::string operation;
    std::string clause; // rendered first-false guard leaf
    Span span;
};

struct RuntimeFault {
    std::string detail;
};

struct ExecutionResult {
    std::variant<Success, PreconditionFailure, RuntimeFault> outcome;
    double exec_ms = 0.0;
    std::set<std::uint64_t> touched;
    // Final variable bindings (inputs, definitions, created objects); the
    // contract-satisfaction oracle evaluates the postcondition with these.
    ocl::Bindings bindings;

    bool ok() const { return std::holds_alternative<Success>(outcome); }
    const Success* success() const { return std::get_if<Success>(&outcome); }
    const PreconditionFailure* precondition_failure() const {
        return std::get_if<PreconditionFailure>(&outcome);
    }
    const RuntimeFault* fault() const { return std::get_if<RuntimeFault>(&outcome); }
};

struct ExecContext {
    std::int64_t today = 0;
};

// Runs one unit against the store: snapshot, definition finds, short-circuit
// guard, then effects applied to a working copy that commits atomically on
// success. On PreconditionFailure or RuntimeFault the store is untouched.
ExecutionResult execute(const logic::BusinessLogicUnit& unit, EntityStore& store,
                        const ocl::Bindings& inputs, const ExecContext& ctx);

} // namespace rmc::rt
