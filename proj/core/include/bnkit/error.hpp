#ifndef BNKIT_ERROR_HPP
#define BNKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bnkit {

// Broad classes used by the CLI to choose an exit code.
enum class ErrorClass {
    Usage,     // bad identifiers, malformed input text, contract misuse
    Data,      // problems with the data itself (missing values, empty subsets)
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), m_class(cls) {}
    ErrorClass error_class() const noexcept { return m_class; }

private:
    ErrorClass m_class;
};

#define BNKIT_DEFINE_ERROR(Name, Class)                                      \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(ErrorClass::Class, what) {} \
    }

// graph
BNKIT_DEFINE_ERROR(CycleError, Usage);
BNKIT_DEFINE_ERROR(DuplicateArc, Usage);
BNKIT_DEFINE_ERROR(UnknownNode, Usage);
BNKIT_DEFINE_ERROR(SyntaxError, Usage);
BNKIT_DEFINE_ERROR(NodeSetMismatch, Usage);
BNKIT_DEFINE_ERROR(OverlapError, Usage);

// dataset
BNKIT_DEFINE_ERROR(MissingColumn, Data);
BNKIT_DEFINE_ERROR(UnknownLabel, Data);
BNKIT_DEFINE_ERROR(RaggedRow, Data);
BNKIT_DEFINE_ERROR(PartialMapping, Usage);
BNKIT_DEFINE_ERROR(CodeCollision, Usage);
BNKIT_DEFINE_ERROR(BadCuts, Usage);
BNKIT_DEFINE_ERROR(MissingData, Data);

// scoring / search
BNKIT_DEFINE_ERROR(BadSampleSize, Data);
BNKIT_DEFINE_ERROR(ConstraintViolation, Usage);

// inference / posterior
BNKIT_DEFINE_ERROR(StateSpaceTooLarge, Usage);
BNKIT_DEFINE_ERROR(ZeroProbabilityEvidence, Data);
BNKIT_DEFINE_ERROR(EmptySubset, Data);

// file formats
BNKIT_DEFINE_ERROR(FormatError, Usage);

#undef BNKIT_DEFINE_ERROR

}  // namespace bnkit

#endif  // BNKIT_ERROR_HPP
