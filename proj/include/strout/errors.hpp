#ifndef STROUT_ERRORS_HPP
#define STROUT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace strout {

/// Base class of every error raised by the library. `kind()` is a stable
/// identifier used by the CLI diagnostics and by tests.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

    /// Data errors map to exit status 1, usage errors to 2.
    virtual bool is_usage_error() const noexcept { return false; }

private:
    std::string kind_;
};

#define STROUT_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

// hierarchy
STROUT_DEFINE_ERROR(OverlapError);
STROUT_DEFINE_ERROR(CoverageError);
STROUT_DEFINE_ERROR(EmptyClassError);
STROUT_DEFINE_ERROR(UnknownCharacter);
STROUT_DEFINE_ERROR(DeclarationError);

// strdist / lof
STROUT_DEFINE_ERROR(DuplicateItems);
STROUT_DEFINE_ERROR(KOutOfRange);
STROUT_DEFINE_ERROR(SameObject);
STROUT_DEFINE_ERROR(EmptyRange);
STROUT_DEFINE_ERROR(DatasetTooSmall);

// hilre
STROUT_DEFINE_ERROR(EmptyDataset);
STROUT_DEFINE_ERROR(CandidateExplosion);
STROUT_DEFINE_ERROR(RegexParseError);

// expharness
STROUT_DEFINE_ERROR(SourceTooSmall);
STROUT_DEFINE_ERROR(EmptyRecords);
STROUT_DEFINE_ERROR(ConfigError);

#undef STROUT_DEFINE_ERROR

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("UsageError", what) {}
    bool is_usage_error() const noexcept override { return true; }
};

}  // namespace strout

#endif  // STROUT_ERRORS_HPP
