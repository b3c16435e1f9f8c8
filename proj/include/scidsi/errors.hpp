#pragma once

#include <stdexcept>
#include <string>

namespace scidsi {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in rejects reports and DSI output rows.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SCIDSI_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

// Caller broke a documented precondition (bad argument or configuration).
SCIDSI_DEFINE_ERROR(PreconditionError);
SCIDSI_DEFINE_ERROR(ConfigError);
SCIDSI_DEFINE_ERROR(IoError);

// corpus
SCIDSI_DEFINE_ERROR(UnmappedSubject);
SCIDSI_DEFINE_ERROR(ParseError);

// textprep
SCIDSI_DEFINE_ERROR(EmptySentence);
SCIDSI_DEFINE_ERROR(EmptyCorpus);

// embedding
SCIDSI_DEFINE_ERROR(IntegrityError);
SCIDSI_DEFINE_ERROR(CacheSpecMismatch);
SCIDSI_DEFINE_ERROR(CorruptCache);
SCIDSI_DEFINE_ERROR(NotFound);

/// Provider could not be reached; callers may retry.
SCIDSI_DEFINE_ERROR(TransportError);

// dsi
SCIDSI_DEFINE_ERROR(ZeroNormError);
SCIDSI_DEFINE_ERROR(DimensionError);
SCIDSI_DEFINE_ERROR(DocumentTooShort);

// stats
SCIDSI_DEFINE_ERROR(DomainError);
SCIDSI_DEFINE_ERROR(ConstantSeriesError);
SCIDSI_DEFINE_ERROR(RankError);
SCIDSI_DEFINE_ERROR(SchemaError);

#undef SCIDSI_DEFINE_ERROR

}  // namespace scidsi
