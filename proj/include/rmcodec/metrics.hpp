#pragma once

#include "rmcodec/diagnostics.hpp"
#include "rmcodec/executor.hpp"
#include "rmcodec/logic.hpp"
#include "rmcodec/model.hpp"
#include "rmcodec/store.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmc::metrics {

struct MetricsRow {
    std::string operation;
    int loc = 0;
    int aa = 0;
    double gen_ms = 0.0;
    std::optional<double> exec_ms; // absent when the operation has no scenario
};

// Per-operation demo inputs for the ET column.
struct Scenario {
    std::string operation;
    ocl::Bindings inputs;
    std::int64_t today = 0;
    Span span;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    const Scenario* for_operation(const std::string& op) const;
};

// Keyed text format, one scenario per line:
//   <operation> today=<int> <name>=<value> ...
// String values are double-quoted, enum values written Enum::LITERAL.
std::optional<ScenarioSet> parse_scenarios(std::string_view text, const std::string& origin,
                                           const model::RequirementModel& m, Diagnostics& diags);

// Computes the per-operation metrics table in corpus order. GT and ET use a
// monotonic clock, one discarded warm-up run, then the average of 3 timed
// runs. Execution runs against a fresh copy of `base_store` per run; a
// scenario whose run does not succeed is a ScenarioError.
std::vector<MetricsRow> metrics_report(const model::RequirementModel& m,
                                       const logic::ApplicationUnit& app,
                                       const rt::EntityStore* base_store,
                                       const ScenarioSet* scenarios, Diagnostics& diags);

// Column order UseCase,LOC,AA,GT,ET; times in ms with 5 decimals, ET empty
// when absent.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

} // namespace rmc::metrics
