#include "rmcodec/lexer.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace rmc {

const char* token_name(Tok t) {
    switch (t) {
        case Tok::End: return "end of input";
        case Tok::Identifier: return "identifier";
        case Tok::Integer: return "integer literal";
        case Tok::Real: return "real literal";
        case Tok::String: return "string literal";
        case Tok::KwEntity: return "'entity'";
        case Tok::KwEnum: return "'enum'";
        case Tok::KwActor: return "'actor'";
        case Tok::KwUsecase: return "'usecase'";
        case Tok::KwService: return "'service'";
        case Tok::KwOperation: return "'operation'";
        case Tok::KwContract: return "'contract'";
        case Tok::KwDefinition: return "'definition'";
        case Tok::KwPrecondition: return "'precondition'";
        case Tok::KwPostcondition: return "'postcondition'";
        case Tok::KwInverse: return "'inverse'";
        case Tok::KwOne: return "'one'";
        case Tok::KwMany: return "'many'";
        case Tok::KwAnd: return "'and'";
        case Tok::KwOr: return "'or'";
        case Tok::KwNot: return "'not'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwEndif: return "'endif'";
        case Tok::KwLet: return "'let'";
        case Tok::KwIn: return "'in'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwSet: return "'Set'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Colon: return "':'";
        case Tok::ColonColon: return "'::'";
        case Tok::Comma: return "','";
        case Tok::Semicolon: return "';'";
        case Tok::Dot: return "'.'";
        case Tok::Arrow: return "'->'";
        case Tok::Bar: return "'|'";
        case Tok::Eq: return "'='";
        case Tok::Ne: return "'<>'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::AtPre: return "'@pre'";
    }
    return "token";
}

namespace {

const std::map<std::string, Tok, std::less<>>& keywords() {
    static const std::map<std::string, Tok, std::less<>> kw = {
        {"entity", Tok::KwEntity},       {"enum", Tok::KwEnum},
        {"actor", Tok::KwActor},         {"usecase", Tok::KwUsecase},
        {"service", Tok::KwService},     {"operation", Tok::KwOperation},
        {"contract", Tok::KwContract},   {"definition", Tok::KwDefinition},
        {"precondition", Tok::KwPrecondition}, {"postcondition", Tok::KwPostcondition},
        {"inverse", Tok::KwInverse},     {"one", Tok::KwOne},
        {"many", Tok::KwMany},           {"and", Tok::KwAnd},
        {"or", Tok::KwOr},               {"not", Tok::KwNot},
        {"if", Tok::KwIf},               {"then", Tok::KwThen},
        {"else", Tok::KwElse},           {"endif", Tok::KwEndif},
        {"let", Tok::KwLet},             {"in", Tok::KwIn},
        {"true", Tok::KwTrue},           {"false", Tok::KwFalse},
        {"Set", Tok::KwSet},
    };
    return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

std::vector<Token> lex(std::string_view src, const std::string& origin, Diagnostics& diags) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    auto here = [&] { return Span{origin, line, col}; };
    auto push = [&](Tok kind, Span span, std::string text = {}) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = span;
        out.push_back(std::move(t));
    };
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Span span = here();
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            std::string word(src.substr(i, j - i));
            advance(j - i);
            auto it = keywords().find(word);
            if (it != keywords().end()) {
                push(it->second, span, word);
            } else {
                push(Tok::Identifier, span, word);
            }
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            bool is_real = false;
            if (j + 1 < src.size() && src[j] == '.' &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                is_real = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            std::string num(src.substr(i, j - i));
            advance(j - i);
            Token t;
            t.span = span;
            t.text = num;
            if (is_real) {
                t.kind = Tok::Real;
                t.real_val = std::strtod(num.c_str(), nullptr);
            } else {
                t.kind = Tok::Integer;
                t.int_val = std::strtoll(num.c_str(), nullptr, 10);
            }
            out.push_back(std::move(t));
            continue;
        }
        if (c == '"') {
            advance(1);
            std::string text;
            bool closed = false;
            while (i < src.size()) {
                char d = src[i];
                if (d == '"') {
                    advance(1);
                    closed = true;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\' && i + 1 < src.size()) {
                    char e = src[i + 1];
                    switch (e) {
                        case 'n': text += '\n'; break;
                        case 't': text += '\t'; break;
                        case '\\': text += '\\'; break;
                        case '"': text += '"'; break;
                        default:
                            diags.add(Code::SyntaxError, here(),
                                      std::string("unknown escape '\\") + e + "'");
                            text += e;
                    }
                    advance(2);
                    continue;
                }
                text += d;
                advance(1);
            }
            if (!closed) {
                diags.add(Code::SyntaxError, span, "unterminated string literal");
            }
            push(Tok::String, span, text);
            continue;
        }
        if (c == '@') {
            if (src.substr(i, 4) == "@pre") {
                advance(4);
                push(Tok::AtPre, span, "@pre");
            } else {
                diags.add(Code::SyntaxError, span, "expected '@pre' after '@'");
                advance(1);
            }
            continue;
        }
        auto two = src.substr(i, 2);
        if (two == "->") { advance(2); push(Tok::Arrow, span); continue; }
        if (two == "::") { advance(2); push(Tok::ColonColon, span); continue; }
        if (two == "<>") { advance(2); push(Tok::Ne, span); continue; }
        if (two == "<=") { advance(2); push(Tok::Le, span); continue; }
        if (two == ">=") { advance(2); push(Tok::Ge, span); continue; }
        Tok single = Tok::End;
        switch (c) {
            case '{': single = Tok::LBrace; break;
            case '}': single = Tok::RBrace; break;
            case '(': single = Tok::LParen; break;
            case ')': single = Tok::RParen; break;
            case ':': single = Tok::Colon; break;
            case ',': single = Tok::Comma; break;
            case ';': single = Tok::Semicolon; break;
            case '.': single = Tok::Dot; break;
            case '|': single = Tok::Bar; break;
            case '=': single = Tok::Eq; break;
            case '<': single = Tok::Lt; break;
            case '>': single = Tok::Gt; break;
            case '+': single = Tok::Plus; break;
            case '-': single = Tok::Minus; break;
            case '*': single = Tok::Star; break;
            case '/': single = Tok::Slash; break;
            default: break;
        }
        if (single != Tok::End) {
            advance(1);
            push(single, span);
            continue;
        }
        diags.add(Code::SyntaxError, span, std::string("unexpected character '") + c + "'");
        advance(1);
    }

    Token end;
    end.kind = Tok::End;
    end.span = here();
    out.push_back(std::move(end));
    return out;
}

} // namespace rmc
