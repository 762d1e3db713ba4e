#pragma once

#include "rmcodec/diagnostics.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rmc {

enum class Tok {
    End,
    Identifier,
    Integer,
    Real,
    String,
    // keywords
    KwEntity,
    KwEnum,
    KwActor,
    KwUsecase,
    KwService,
    KwOperation,
    KwContract,
    KwDefinition,
    KwPrecondition,
    KwPostcondition,
    KwInverse,
    KwOne,
    KwMany,
    KwAnd,
    KwOr,
    KwNot,
    KwIf,
    KwThen,
    KwElse,
    KwEndif,
    KwLet,
    KwIn,
    KwTrue,
    KwFalse,
    KwSet,
    // punctuation / operators
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    ColonColon,
    Comma,
    Semicolon,
    Dot,
    Arrow,   // ->
    Bar,     // |
    Eq,      // =
    Ne,      // <>
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    AtPre,   // @pre
};

struct Token {
    Tok kind = Tok::End;
    std::string text;      // identifier/string payload (strings are unescaped)
    std::int64_t int_val = 0;
    double real_val = 0.0;
    Span span;
};

const char* token_name(Tok t);

// Lexes a whole source buffer. Comments are `//` to end of line. On a bad
// character or unterminated string a SyntaxError diagnostic is emitted and
// lexing resumes after the offending byte.
std::vector<Token> lex(std::string_view source, const std::string& origin, Diagnostics& diags);

} // namespace rmc
