#pragma once

#include <stdexcept>
#include <string>

namespace qn {

// Machine-readable failure tokens. The CLI prints exactly these on stderr.
enum class Err {
    NotAProductOfBases,
    NotInRing,
    OutOfRange,
    DomainError,
    SideUndefined,
    IndexOutOfRange,
    NotInFn,
    SignatureMismatch,
    BadPartial,
    NotACone,
    NotAnNaryInterval,
    BreakpointNotInRing,
    SlopeNotFactorable,
    CrossingCountMismatch,
    NotInFEta,
    NotAStabilizer,
    DepthTooSmall,
    NotInWindow,
    TooWide,
    TrivialInput,
    DuplicatePoint,
    UnsupportedBase,
    UnknownSuite,
    ParseError,
    Internal,
};

inline const char* err_token(Err e) {
    switch (e) {
        case Err::NotAProductOfBases: return "NotAProductOfBases";
        case Err::NotInRing: return "NotInRing";
        case Err::OutOfRange: return "OutOfRange";
        case Err::DomainError: return "DomainError";
        case Err::SideUndefined: return "SideUndefined";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::NotInFn: return "NotInFn";
        case Err::SignatureMismatch: return "SignatureMismatch";
        case Err::BadPartial: return "BadPartial";
        case Err::NotACone: return "NotACone";
        case Err::NotAnNaryInterval: return "NotAnNaryInterval";
        case Err::BreakpointNotInRing: return "BreakpointNotInRing";
        case Err::SlopeNotFactorable: return "SlopeNotFactorable";
        case Err::CrossingCountMismatch: return "CrossingCountMismatch";
        case Err::NotInFEta: return "NotInFEta";
        case Err::NotAStabilizer: return "NotAStabilizer";
        case Err::DepthTooSmall: return "DepthTooSmall";
        case Err::NotInWindow: return "NotInWindow";
        case Err::TooWide: return "TooWide";
        case Err::TrivialInput: return "TrivialInput";
        case Err::DuplicatePoint: return "DuplicatePoint";
        case Err::UnsupportedBase: return "UnsupportedBase";
        case Err::UnknownSuite: return "UnknownSuite";
        case Err::ParseError: return "ParseError";
        case Err::Internal: return "Internal";
    }
    return "Internal";
}

class QnError : public std::runtime_error {
public:
    QnError(Err code, const std::string& detail)
        : std::runtime_error(std::string(err_token(code)) + ": " + detail), code_(code) {}

    Err code() const { return code_; }
    std::string token() const { return err_token(code_); }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& detail) { throw QnError(code, detail); }

}  // namespace qn
