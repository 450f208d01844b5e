#pragma once

#include <stdexcept>
#include <string>

namespace cyclicsim {

enum class Errc {
    DuplicateNodeId,
    DanglingLinkEndpoint,
    DisconnectedGraph,
    EndStationDegreeViolation,
    InvalidParameter,
    GenerationFailed,
    ParseError,
    NoPath,
    EmptyFlowSet,
    Overflow,
    UnknownFlowId,
    OffsetConstraintViolation,
    UnknownGroup,
    MissingQid,
    UnknownHop,
    ValidationError,
    MismatchedFlowSets,
    MissingFlow,
    IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace cyclicsim
