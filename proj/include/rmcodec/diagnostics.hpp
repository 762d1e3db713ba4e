#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace rmc {

struct Span {
    std::string file;
    int line = 0;
    int col = 0;

    bool operator==(const Span&) const = default;
};

enum class Severity { Error, Warning };

// Diagnostic codes follow the error names used throughout the tool's docs.
enum class Code {
    SyntaxError,
    ResolutionError,
    DuplicateError,
    ContractArityError,
    TypeError,
    ScopeError,
    UnclassifiableDefinition,
    UnclassifiablePrecondition,
    UnclassifiablePostcondition,
    EquationFormError,
    DataflowError,
    IoError,
    FormatError,
    SchemaMismatch,
    ScenarioError,
};

const char* code_name(Code code);

struct Diagnostic {
    Code code;
    Severity severity = Severity::Error;
    Span span;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

// Renders one diagnostic as `path:line:col: CODE severity: message`.
std::string format_diagnostic(const Diagnostic& d);

class Diagnostics {
public:
    void add(Code code, Span span, std::string message, Severity sev = Severity::Error) {
        items_.push_back({code, sev, std::move(span), std::move(message)});
    }

    bool has_errors() const {
        return std::any_of(items_.begin(), items_.end(),
                           [](const Diagnostic& d) { return d.severity == Severity::Error; });
    }

    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    const std::vector<Diagnostic>& items() const { return items_; }

    // Stable output ordering: by file, then position, then code.
    std::vector<Diagnostic> sorted() const;

    // All diagnostics, one per line, in sorted order.
    std::string to_string() const;

private:
    std::vector<Diagnostic> items_;
};

} // namespace rmc
