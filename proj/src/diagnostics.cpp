#include "rmcodec/diagnostics.hpp"

#include <sstream>
#include <tuple>

namespace rmc {

const char* code_name(Code code) {
    switch (code) {
        case Code::SyntaxError: return "SyntaxError";
        case Code::ResolutionError: return "ResolutionError";
        case Code::DuplicateError: return "DuplicateError";
        case Code::ContractArityError: return "ContractArityError";
        case Code::TypeError: return "TypeError";
        case Code::ScopeError: return "ScopeError";
        case Code::UnclassifiableDefinition: return "UnclassifiableDefinition";
        case Code::UnclassifiablePrecondition: return "UnclassifiablePrecondition";
        case Code::UnclassifiablePostcondition: return "UnclassifiablePostcondition";
        case Code::EquationFormError: return "EquationFormError";
        case Code::DataflowError: return "DataflowError";
        case Code::IoError: return "IoError";
        case Code::FormatError: return "FormatError";
        case Code::SchemaMismatch: return "SchemaMismatch";
        case Code::ScenarioError: return "ScenarioError";
    }
    return "UnknownError";
}

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    os << d.span.file << ':' << d.span.line << ':' << d.span.col << ": " << code_name(d.code)
       << ' ' << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
    return os.str();
}

std::vector<Diagnostic> Diagnostics::sorted() const {
    std::vector<Diagnostic> out = items_;
    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.file, a.span.line, a.span.col) <
               std::tie(b.span.file, b.span.line, b.span.col);
    });
    return out;
}

std::string Diagnostics::to_string() const {
    std::string out;
    for (const Diagnostic& d : sorted()) {
        out += format_diagnostic(d);
        out += '\n';
    }
    return out;
}

} // namespace rmc
