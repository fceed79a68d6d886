#pragma once

#include <stdexcept>
#include <string>

namespace aeq {

enum class ErrorKind {
    SizeLimit,
    InvalidDesign,
    IndexOutOfRange,
    UnsupportedSize,
    DegenerateFilter,
    NonIsomorphicDesign,
    Convention,
    Singular,
    Precondition,
    OrderingViolation,
    RankDeficiency,
    EmptyBin,
    UnsupportedCombination,
    InvalidArgument,
    Validation,
    Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Gram-Schmidt failure that remembers the offending (0-based) column.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(std::size_t index, double residual)
        : Error(ErrorKind::RankDeficiency,
                "residual norm " + std::to_string(residual) + " at basis index " +
                    std::to_string(index)),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace aeq
