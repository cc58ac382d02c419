#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace toneforge {

// Base class for every error raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain invariant was violated (e.g. rewrite_model set without rewrite_text).
class InvariantError : public Error {
public:
    using Error::Error;
};

// A caller-side precondition did not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Pipeline steps run out of order (e.g. judge before inference).
class OrderingError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SnapshotNotFound : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

// Strict snapshot parse failure. row is the 1-based data row (0 = header),
// column the 0-based column index, or npos when the whole row is at fault.
class MalformedSnapshot : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    MalformedSnapshot(std::string file, std::size_t row, std::size_t column, const std::string& what);

    const std::string& file() const noexcept { return file_; }
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t row_;
    std::size_t column_;
};

class PromptError : public Error {
public:
    using Error::Error;
};

// Missing or extra render variable. var() names the offending placeholder.
class RenderError : public Error {
public:
    RenderError(std::string var, const std::string& what) : Error(what), var_(std::move(var)) {}
    const std::string& var() const noexcept { return var_; }

private:
    std::string var_;
};

// No CSV rows could be recovered from a generator reply.
class ParseFailure : public Error {
public:
    ParseFailure(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

class GenerationShortfall : public Error {
public:
    GenerationShortfall(std::size_t obtained, std::size_t requested);
    std::size_t obtained() const noexcept { return obtained_; }
    std::size_t requested() const noexcept { return requested_; }

private:
    std::size_t obtained_;
    std::size_t requested_;
};

// No integer bracket group found in judge output.
class ExtractionError : public Error {
public:
    ExtractionError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

// The last integer bracket group held a value outside the allowed set.
class ScoreRangeError : public ExtractionError {
public:
    ScoreRangeError(long value, std::string raw);
    long value() const noexcept { return value_; }

private:
    long value_;
};

class AgreementError : public Error {
public:
    using Error::Error;
};

}  // namespace toneforge
