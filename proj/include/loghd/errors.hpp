#pragma once

#include <stdexcept>
#include <string>

namespace loghd {

// Error taxonomy. The CLI maps these onto process exit codes.
enum class ErrorKind {
    input,          // dimension mismatch on a query vector
    domain,         // argument outside the mathematical domain of an operation
    training,       // degenerate training data (empty class, zero-sum vector)
    configuration,  // infeasible or invalid configuration
    ingestion,      // malformed dataset file
    format,         // malformed or corrupted model file
    internal,       // broken invariant inside the library
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define LOGHD_DEFINE_ERROR(Name, Kind)                                            \
    class Name : public Error {                                                   \
    public:                                                                       \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

LOGHD_DEFINE_ERROR(InputError, input)
LOGHD_DEFINE_ERROR(DomainError, domain)
LOGHD_DEFINE_ERROR(TrainingError, training)
LOGHD_DEFINE_ERROR(ConfigError, configuration)
LOGHD_DEFINE_ERROR(IngestionError, ingestion)
LOGHD_DEFINE_ERROR(FormatError, format)
LOGHD_DEFINE_ERROR(InternalError, internal)

#undef LOGHD_DEFINE_ERROR

}  // namespace loghd
