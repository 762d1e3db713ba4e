#include "rmcodec/metrics.hpp"

#include "rmcodec/actions.hpp"
#include "rmcodec/emitter.hpp"
#include "rmcodec/lexer.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace rmc::metrics {

const Scenario* ScenarioSet::for_operation(const std::string& op) const {
    for (const Scenario& s : scenarios) {
        if (s.operation == op) return &s;
    }
    return nullptr;
}

namespace {

bool parse_scenario_value(const std::vector<Token>& toks, std::size_t& pos, const StaticType& type,
                          const model::RequirementModel& m, Value& out) {
    using K = StaticType::Kind;
    const Token& t = toks[pos];
    switch (type.kind) {
        case K::Integer:
        case K::Date:
            if (t.kind == Tok::Integer) {
                out = t.int_val;
                ++pos;
                return true;
            }
            if (t.kind == Tok::Minus && toks[pos + 1].kind == Tok::Integer) {
                out = -toks[pos + 1].int_val;
                pos += 2;
                return true;
            }
            return false;
        case K::Real:
            if (t.kind == Tok::Real) {
                out = t.real_val;
                ++pos;
                return true;
            }
            if (t.kind == Tok::Integer) {
                out = static_cast<double>(t.int_val);
                ++pos;
                return true;
            }
            return false;
        case K::Boolean:
            if (t.kind == Tok::KwTrue || t.kind == Tok::KwFalse) {
                out = t.kind == Tok::KwTrue;
                ++pos;
                return true;
            }
            return false;
        case K::String:
            if (t.kind == Tok::String) {
                out = t.text;
                ++pos;
                return true;
            }
            return false;
        case K::Enum:
            if (t.kind == Tok::Identifier && toks[pos + 1].kind == Tok::ColonColon &&
                toks[pos + 2].kind == Tok::Identifier) {
                if (t.text != type.name) return false;
                const model::EnumDecl* decl = m.enumeration(type.name);
                if (!decl || !decl->has_literal(toks[pos + 2].text)) return false;
                out = EnumValue{t.text, toks[pos + 2].text};
                pos += 3;
                return true;
            }
            return false;
        default:
            return false;
    }
}

} // namespace

std::optional<ScenarioSet> parse_scenarios(std::string_view text, const std::string& origin,
                                           const model::RequirementModel& m, Diagnostics& diags) {
    ScenarioSet set;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    bool ok = true;
    while (std::getline(is, line)) {
        ++lineno;
        std::string trimmed = line;
        std::size_t start = trimmed.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (trimmed[start] == '#') continue;

        Span line_span{origin, lineno, 1};
        Diagnostics lex_diags;
        std::vector<Token> toks = lex(line, origin, lex_diags);
        for (Token& t : toks) t.span.line = lineno;
        if (lex_diags.has_errors()) {
            diags.add(Code::ScenarioError, line_span, "unreadable scenario line");
            ok = false;
            continue;
        }
        std::size_t pos = 0;
        if (toks[pos].kind != Tok::Identifier) {
            diags.add(Code::ScenarioError, line_span, "scenario line must start with an operation");
            ok = false;
            continue;
        }
        Scenario sc;
        sc.operation = toks[pos++].text;
        sc.span = line_span;
        const model::ContractDecl* contract = m.contract_for(sc.operation);
        if (!contract) {
            diags.add(Code::ScenarioError, line_span,
                      "scenario names unknown operation '" + sc.operation + "'");
            ok = false;
            continue;
        }
        bool line_ok = true;
        while (toks[pos].kind != Tok::End && line_ok) {
            if (toks[pos].kind != Tok::Identifier || toks[pos + 1].kind != Tok::Eq) {
                diags.add(Code::ScenarioError, line_span, "expected name=value");
                line_ok = false;
                break;
            }
            std::string name = toks[pos].text;
            pos += 2;
            if (name == "today") {
                if (toks[pos].kind != Tok::Integer) {
                    diags.add(Code::ScenarioError, line_span, "today must be an integer");
                    line_ok = false;
                    break;
                }
                sc.today = toks[pos++].int_val;
                continue;
            }
            const model::ParamDecl* param = nullptr;
            for (const model::ParamDecl& p : contract->inputs) {
                if (p.name == name) param = &p;
            }
            if (!param) {
                diags.add(Code::ScenarioError, line_span,
                          "operation '" + sc.operation + "' has no input '" + name + "'");
                line_ok = false;
                break;
            }
            Value v;
            if (!parse_scenario_value(toks, pos, param->type, m, v)) {
                diags.add(Code::ScenarioError, line_span,
                          "bad value for input '" + name + "' (" + render_type(param->type) + ")");
                line_ok = false;
                break;
            }
            sc.inputs[name] = std::move(v);
        }
        if (!line_ok) {
            ok = false;
            continue;
        }
        for (const model::ParamDecl& p : contract->inputs) {
            if (!sc.inputs.count(p.name)) {
                diags.add(Code::ScenarioError, line_span,
                          "scenario for '" + sc.operation + "' is missing input '" + p.name + "'");
                ok = false;
            }
        }
        set.scenarios.push_back(std::move(sc));
    }
    if (!ok) return std::nullopt;
    return set;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

std::vector<MetricsRow> metrics_report(const model::RequirementModel& m,
                                       const logic::ApplicationUnit& app,
                                       const rt::EntityStore* base_store,
                                       const ScenarioSet* scenarios, Diagnostics& diags) {
    std::vector<MetricsRow> rows;
    for (const logic::ServiceUnit& service : app.services) {
        for (const logic::BusinessLogicUnit& unit : service.units) {
            MetricsRow row;
            row.operation = unit.signature.operation;
            row.aa = static_cast<int>(unit.definition_block.size()) +
                     static_cast<int>(unit.guard_actions.size()) +
                     actions::effect_action_count(unit.effect_block);
            row.loc = count_loc(emit_listing(unit));

            // GT: warm-up discarded, then the average of 3 timed generations.
            const model::ContractDecl* contract = unit.contract;
            double total = 0.0;
            for (int run = -1; run < 3; ++run) {
                auto start = std::chrono::steady_clock::now();
                Diagnostics scratch;
                auto classified = actions::classify_contract(*contract, m, scratch);
                if (classified) {
                    auto generated = logic::generate_logic(*classified, *contract, scratch);
                    if (generated) {
                        volatile int sink = count_loc(emit_listing(*generated));
                        (void)sink;
                    }
                }
                double elapsed = ms_since(start);
                if (run >= 0) total += elapsed;
            }
            row.gen_ms = total / 3.0;

            const Scenario* scenario =
                scenarios ? scenarios->for_operation(unit.signature.operation) : nullptr;
            if (scenario && base_store) {
                double exec_total = 0.0;
                bool exec_ok = true;
                for (int run = -1; run < 3 && exec_ok; ++run) {
                    rt::EntityStore copy = *base_store;
                    rt::ExecContext ctx{scenario->today};
                    auto start = std::chrono::steady_clock::now();
                    rt::ExecutionResult r = rt::execute(unit, copy, scenario->inputs, ctx);
                    double elapsed = ms_since(start);
                    if (!r.ok()) {
                        std::string why;
                        if (const auto* p = r.precondition_failure()) {
                            why = "precondition failed at " + p->clause;
                        } else if (const auto* f = r.fault()) {
                            why = f->detail;
                        }
                        diags.add(Code::ScenarioError, scenario->span,
                                  "scenario for '" + unit.signature.operation +
                                      "' did not succeed: " + why);
                        exec_ok = false;
                        break;
                    }
                    if (run >= 0) exec_total += elapsed;
                }
                if (exec_ok) row.exec_ms = exec_total / 3.0;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    os << "UseCase,LOC,AA,GT,ET\n";
    char buf[64];
    for (const MetricsRow& row : rows) {
        os << row.operation << ',' << row.loc << ',' << row.aa << ',';
        std::snprintf(buf, sizeof buf, "%.5f", row.gen_ms);
        os << buf << ',';
        if (row.exec_ms) {
            std::snprintf(buf, sizeof buf, "%.5f", *row.exec_ms);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
    std::vector<MetricsRow> rows;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (fields.size() != 5) continue;
        MetricsRow row;
        row.operation = fields[0];
        row.loc = std::atoi(fields[1].c_str());
        row.aa = std::atoi(fields[2].c_str());
        row.gen_ms = std::atof(fields[3].c_str());
        if (!fields[4].empty()) row.exec_ms = std::atof(fields[4].c_str());
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace rmc::metrics
