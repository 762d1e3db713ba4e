// rmcodec: compiles textual requirement models into an executable two-layer
// application and runs, inspects and measures the result.
//
// Exit codes: 0 success, 1 model error, 2 I/O error, 3 precondition failure,
// 4 runtime fault. Diagnostics go to stderr, results to stdout.

#include "rmcodec/actions.hpp"
#include "rmcodec/emitter.hpp"
#include "rmcodec/executor.hpp"
#include "rmcodec/logic.hpp"
#include "rmcodec/metrics.hpp"
#include "rmcodec/model.hpp"
#include "rmcodec/store.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModelError = 1;
constexpr int kExitIo = 2;
constexpr int kExitPreconditionFailure = 3;
constexpr int kExitRuntimeFault = 4;

struct CliError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kExitIo, "IoError: cannot open '" + path + "'"};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_diagnostics(const rmc::Diagnostics& diags) {
    std::cerr << diags.to_string();
}

std::unique_ptr<rmc::model::RequirementModel> load_model(const std::vector<std::string>& paths) {
    std::vector<std::pair<std::string, std::string>> sources;
    for (const std::string& path : paths) {
        sources.emplace_back(path, read_file(path));
    }
    rmc::Diagnostics diags;
    auto model = rmc::model::parse_model_files(sources, diags);
    if (!model) {
        print_diagnostics(diags);
        throw CliError{kExitModelError, "model did not parse"};
    }
    print_diagnostics(diags); // warnings, if any
    return model;
}

std::unique_ptr<rmc::logic::ApplicationUnit> compile_application(
    const rmc::model::RequirementModel& model) {
    rmc::Diagnostics diags;
    auto app = rmc::logic::generate_application(model, diags);
    if (!app) {
        print_diagnostics(diags);
        throw CliError{kExitModelError, "model did not compile"};
    }
    return app;
}

// name=value inputs, parsed against the contract signature.
rmc::ocl::Bindings parse_inputs(const std::vector<std::string>& pairs,
                                const rmc::model::ContractDecl& contract,
                                const rmc::model::RequirementModel& model) {
    rmc::ocl::Bindings out;
    for (const std::string& pair : pairs) {
        std::size_t eq = pair.find('=');
        if (eq == std::string::npos) {
            throw CliError{kExitModelError, "input '" + pair + "' is not name=value"};
        }
        std::string name = pair.substr(0, eq);
        std::string text = pair.substr(eq + 1);
        const rmc::model::ParamDecl* param = nullptr;
        for (const rmc::model::ParamDecl& p : contract.inputs) {
            if (p.name == name) param = &p;
        }
        if (!param) {
            throw CliError{kExitModelError,
                           "operation '" + contract.operation + "' has no input '" + name + "'"};
        }
        using K = rmc::StaticType::Kind;
        try {
            switch (param->type.kind) {
                case K::Integer:
                case K::Date:
                    out[name] = static_cast<std::int64_t>(std::stoll(text));
                    break;
                case K::Real:
                    out[name] = std::stod(text);
                    break;
                case K::Boolean:
                    if (text == "true") {
                        out[name] = true;
                    } else if (text == "false") {
                        out[name] = false;
                    } else {
                        throw CliError{kExitModelError,
                                       "input '" + name + "' must be true or false"};
                    }
                    break;
                case K::String:
                    out[name] = text;
                    break;
                case K::Enum: {
                    std::string literal = text;
                    std::size_t sep = literal.find("::");
                    if (sep != std::string::npos) {
                        std::string enum_name = literal.substr(0, sep);
                        if (enum_name != param->type.name) {
                            throw CliError{kExitModelError,
                                           "input '" + name + "' expects " + param->type.name};
                        }
                        literal = literal.substr(sep + 2);
                    }
                    const rmc::model::EnumDecl* decl = model.enumeration(param->type.name);
                    if (!decl || !decl->has_literal(literal)) {
                        throw CliError{kExitModelError, "'" + literal + "' is not a literal of " +
                                                            param->type.name};
                    }
                    out[name] = rmc::EnumValue{param->type.name, literal};
                    break;
                }
                default:
                    throw CliError{kExitModelError, "input '" + name + "' has unsupported type"};
            }
        } catch (const std::invalid_argument&) {
            throw CliError{kExitModelError, "input '" + name + "' is not a valid " +
                                                rmc::render_type(param->type)};
        } catch (const std::out_of_range&) {
            throw CliError{kExitModelError, "input '" + name + "' is out of range"};
        }
    }
    for (const rmc::model::ParamDecl& p : contract.inputs) {
        if (!out.count(p.name)) {
            throw CliError{kExitModelError, "missing input '" + p.name + "' (use --in " + p.name +
                                                "=value)"};
        }
    }
    return out;
}

int map_store_error(const rmc::rt::StoreError& err) {
    using Kind = rmc::rt::StoreError::Kind;
    switch (err.kind) {
        case Kind::Io: return kExitIo;
        default: return kExitModelError;
    }
}

int cmd_check(const std::vector<std::string>& models) {
    auto model = load_model(models);
    std::vector<rmc::Diagnostic> diags = rmc::model::validate_model(*model);
    for (const rmc::Diagnostic& d : diags) std::cerr << rmc::format_diagnostic(d) << "\n";
    bool errors = false;
    for (const rmc::Diagnostic& d : diags) errors |= d.severity == rmc::Severity::Error;
    return errors ? kExitModelError : kExitOk;
}

int cmd_dump_actions(const std::vector<std::string>& models) {
    auto model = load_model(models);
    rmc::Diagnostics diags;
    bool ok = true;
    for (const rmc::model::ServiceDecl& service : model->services) {
        for (const rmc::model::OperationRef& op : service.operations) {
            const rmc::model::ContractDecl* contract = model->contract_for(op.name);
            if (!contract) continue;
            auto classified = rmc::actions::classify_contract(*contract, *model, diags);
            if (!classified) {
                ok = false;
                continue;
            }
            std::cout << "# " << op.name << "\n";
            auto print = [&](const rmc::actions::AtomicAction& a) {
                std::cout << rmc::actions::render_action(a) << " @ " << a.span.file << ':'
                          << a.span.line << ':' << a.span.col << "\n";
            };
            for (const auto& a : classified->definition_actions) print(a);
            for (const auto& a : classified->guard_actions) print(a);
            std::vector<const rmc::actions::AtomicAction*> flat;
            rmc::actions::flatten_effects(classified->effects, flat);
            for (const auto* a : flat) print(*a);
        }
    }
    print_diagnostics(diags);
    return ok ? kExitOk : kExitModelError;
}

int cmd_dump_actions(const std::vector<std::string>& models);

int cmd_compile(const std::vector<std::string>& models, const std::string& out_dir, bool emit_ir,
                bool dump_actions) {
    // --dump-actions is an output mode of its own
    if (dump_actions) return cmd_dump_actions(models);
    auto model = load_model(models);
    auto app = compile_application(*model);
    if (emit_ir) {
        std::cout << rmc::logic::render_ir(*app);
    }
    std::vector<rmc::metrics::Listing> listings = rmc::metrics::emit_listings(*app);
    if (out_dir.empty()) {
        if (!emit_ir) {
            for (const auto& listing : listings) {
                std::cout << listing.text << "\n";
            }
        }
        return kExitOk;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    for (const auto& listing : listings) {
        fs::path dir = fs::path(out_dir) / listing.service;
        fs::create_directories(dir, ec);
        if (ec) throw CliError{kExitIo, "IoError: cannot create '" + dir.string() + "'"};
        fs::path file = dir / (listing.operation + ".txt");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw CliError{kExitIo, "IoError: cannot write '" + file.string() + "'"};
        out << listing.text;
    }
    return kExitOk;
}

int cmd_run(const std::vector<std::string>& models, const std::string& store_path, bool init_empty,
            const std::string& operation, const std::vector<std::string>& input_pairs,
            std::int64_t today) {
    auto model = load_model(models);
    auto app = compile_application(*model);
    const rmc::logic::BusinessLogicUnit* unit = app->unit_for(operation);
    if (!unit) {
        std::cerr << "unknown operation '" << operation << "'\n";
        return kExitModelError;
    }
    rmc::ocl::Bindings inputs = parse_inputs(input_pairs, *unit->contract, *model);

    rmc::rt::EntityStore store(app->schema);
    try {
        if (!init_empty) {
            store = rmc::rt::load_store_file(store_path, app->schema);
        } else if (std::filesystem::exists(store_path)) {
            store = rmc::rt::load_store_file(store_path, app->schema);
        }
    } catch (const rmc::rt::StoreError& err) {
        std::cerr << err.what() << "\n";
        return map_store_error(err);
    }

    rmc::rt::ExecContext ctx{today};
    rmc::rt::ExecutionResult result = rmc::rt::execute(*unit, store, inputs, ctx);
    if (const auto* failure = result.precondition_failure()) {
        std::cerr << "PreconditionIsNotSatisfied(" << failure->operation
                  << "): " << failure->clause << "\n";
        return kExitPreconditionFailure;
    }
    if (const auto* fault = result.fault()) {
        std::cerr << "runtime fault: " << fault->detail << "\n";
        return kExitRuntimeFault;
    }

    // Atomic store rewrite: write a temp file, then rename over the target.
    try {
        std::string tmp = store_path + ".tmp";
        rmc::rt::save_store_file(store, tmp);
        std::filesystem::rename(tmp, store_path);
    } catch (const rmc::rt::StoreError& err) {
        std::cerr << err.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& err) {
        std::cerr << "IoError: " << err.what() << "\n";
        return kExitIo;
    }
    std::cout << rmc::render_value(result.success()->result) << "\n";
    return kExitOk;
}

int cmd_metrics(const std::vector<std::string>& models, const std::string& store_path,
                const std::string& scenarios_path, const std::string& out_path) {
    auto model = load_model(models);
    auto app = compile_application(*model);

    std::optional<rmc::rt::EntityStore> store;
    if (!store_path.empty()) {
        try {
            store = rmc::rt::load_store_file(store_path, app->schema);
        } catch (const rmc::rt::StoreError& err) {
            std::cerr << err.what() << "\n";
            return map_store_error(err);
        }
    }
    std::optional<rmc::metrics::ScenarioSet> scenarios;
    if (!scenarios_path.empty()) {
        rmc::Diagnostics diags;
        scenarios =
            rmc::metrics::parse_scenarios(read_file(scenarios_path), scenarios_path, *model, diags);
        if (!scenarios) {
            print_diagnostics(diags);
            return kExitModelError;
        }
    }

    rmc::Diagnostics diags;
    std::vector<rmc::metrics::MetricsRow> rows = rmc::metrics::metrics_report(
        *model, *app, store ? &*store : nullptr, scenarios ? &*scenarios : nullptr, diags);
    if (diags.has_errors()) {
        print_diagnostics(diags);
        return kExitModelError;
    }
    std::string csv = rmc::metrics::metrics_csv(rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "IoError: cannot write '" << out_path << "'\n";
            return kExitIo;
        }
        out << csv;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"rmcodec - requirement-model compiler and runtime"};
    cli.require_subcommand(1);

    std::vector<std::string> models;
    std::string store_path;
    std::string out_path;
    std::string scenarios_path;
    std::string operation;
    std::vector<std::string> inputs;
    std::int64_t today = 0;
    bool init_empty = false;
    bool emit_ir = false;

    auto add_model_flag = [&](CLI::App* cmd) {
        cmd->add_option("--model", models, "model file (.rm); repeatable")->required();
    };

    CLI::App* check = cli.add_subcommand("check", "parse and validate a model");
    add_model_flag(check);

    CLI::App* compile = cli.add_subcommand("compile", "generate listings (and IR)");
    add_model_flag(compile);
    compile->add_option("--out", out_path, "output directory for listings");
    compile->add_flag("--emit-ir", emit_ir, "print the generated units as IR text");
    bool dump_actions_flag = false;
    compile->add_flag("--dump-actions", dump_actions_flag,
                      "print classified atomic actions instead of listings");

    CLI::App* dump = cli.add_subcommand("dump-actions", "print classified atomic actions");
    add_model_flag(dump);

    CLI::App* run = cli.add_subcommand("run", "execute one operation against a store file");
    add_model_flag(run);
    run->add_option("--store", store_path, "store file")->required();
    run->add_option("--op", operation, "operation name")->required();
    run->add_option("--in", inputs, "input binding name=value; repeatable");
    run->add_option("--today", today, "evaluation date (days since epoch)");
    run->add_flag("--init-empty", init_empty, "start from an empty store if the file is missing");

    CLI::App* metrics = cli.add_subcommand("metrics", "emit the LOC/AA/GT/ET table as CSV");
    add_model_flag(metrics);
    metrics->add_option("--store", store_path, "demo store for execution timing");
    metrics->add_option("--scenarios", scenarios_path, "per-operation demo inputs");
    metrics->add_option("--out", out_path, "CSV output path (default stdout)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return cli.exit(help);
    } catch (const CLI::ParseError& err) {
        cli.exit(err); // prints the usage diagnostic to stderr
        return kExitModelError;
    }

    try {
        if (cli.got_subcommand(check)) return cmd_check(models);
        if (cli.got_subcommand(compile)) {
            return cmd_compile(models, out_path, emit_ir, dump_actions_flag);
        }
        if (cli.got_subcommand(dump)) return cmd_dump_actions(models);
        if (cli.got_subcommand(run)) {
            return cmd_run(models, store_path, init_empty, operation, inputs, today);
        }
        if (cli.got_subcommand(metrics)) {
            return cmd_metrics(models, store_path, scenarios_path, out_path);
        }
    } catch (const CliError& err) {
        std::cerr << err.message << "\n";
        return err.code;
    } catch (const rmc::rt::StoreError& err) {
        std::cerr << err.what() << "\n";
        return map_store_error(err);
    }
    return kExitOk;
}
