#pragma once

#include <stdexcept>
#include <string>

namespace raincast {

// Base class for all library errors so callers can catch one type at the CLI
// boundary while tests can still discriminate the specific failure.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingColumnError : Error {
    explicit MissingColumnError(const std::string& col)
        : Error("missing column: " + col) {}
};

struct TooManyRejectsError : Error {
    TooManyRejectsError(std::size_t rejected, std::size_t total)
        : Error("rejected " + std::to_string(rejected) + " of " +
                std::to_string(total) + " rows (limit exceeded)") {}
};

struct GapInCoverageError : Error {
    explicit GapInCoverageError(const std::string& what) : Error(what) {}
};

struct OutOfRangeError : Error {
    explicit OutOfRangeError(const std::string& what) : Error(what) {}
};

struct NoStationsError : Error {
    explicit NoStationsError(const std::string& district)
        : Error("district has no stations with coordinates: " + district) {}
};

struct KTooLargeError : Error {
    explicit KTooLargeError(const std::string& what) : Error(what) {}
};

struct NonFiniteInputError : Error {
    explicit NonFiniteInputError(const std::string& what) : Error(what) {}
};

struct TooFewPointsError : Error {
    explicit TooFewPointsError(const std::string& what) : Error(what) {}
};

struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& what) : Error(what) {}
};

struct TooFewSamplesError : Error {
    explicit TooFewSamplesError(const std::string& what) : Error(what) {}
};

struct WindowTooEarlyError : Error {
    explicit WindowTooEarlyError(const std::string& what) : Error(what) {}
};

struct HistoryTooShortError : Error {
    explicit HistoryTooShortError(const std::string& what) : Error(what) {}
};

struct InsufficientHistoryError : Error {
    explicit InsufficientHistoryError(const std::string& what) : Error(what) {}
};

struct MissingYearlyFeatureError : Error {
    explicit MissingYearlyFeatureError(const std::string& what) : Error(what) {}
};

struct LengthMismatchError : Error {
    explicit LengthMismatchError(const std::string& what) : Error(what) {}
};

struct ZeroNormalizerError : Error {
    explicit ZeroNormalizerError(const std::string& what) : Error(what) {}
};

struct TooShortError : Error {
    explicit TooShortError(const std::string& what) : Error(what) {}
};

struct MisalignmentError : Error {
    explicit MisalignmentError(const std::string& what) : Error(what) {}
};

struct DegenerateBaselineError : Error {
    explicit DegenerateBaselineError(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace raincast
