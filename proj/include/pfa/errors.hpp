#pragma once

#include <stdexcept>
#include <string>

namespace pfa {

// Base error carrying a stable machine-readable code alongside the message.
// The CLI prints these as "error[<code>]: <message>" and exits with status 2.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define PFA_DEFINE_ERROR(NAME, CODE)                                \
    class NAME : public Error {                                     \
    public:                                                         \
        explicit NAME(const std::string& message)                   \
            : Error(CODE, message) {}                               \
    }

PFA_DEFINE_ERROR(NotSymmetricError, "not_symmetric");
PFA_DEFINE_ERROR(NotUnitDiagonalError, "not_unit_diagonal");
PFA_DEFINE_ERROR(IndefiniteError, "indefinite_beyond_tolerance");
PFA_DEFINE_ERROR(InvalidEpsilonError, "invalid_epsilon");
PFA_DEFINE_ERROR(DegenerateColumnError, "degenerate_column");
PFA_DEFINE_ERROR(DimensionMismatchError, "dimension_mismatch");
PFA_DEFINE_ERROR(RankDeficientError, "rank_deficient_loadings");
PFA_DEFINE_ERROR(NonConvergenceError, "non_convergence");
PFA_DEFINE_ERROR(MissingMaskError, "missing_mask");
PFA_DEFINE_ERROR(DomainError, "domain_error");
PFA_DEFINE_ERROR(IoError, "io_error");
PFA_DEFINE_ERROR(RaggedRowsError, "ragged_rows");
PFA_DEFINE_ERROR(NonNumericCellError, "non_numeric_cell");
PFA_DEFINE_ERROR(InvalidSpecError, "invalid_spec");

#undef PFA_DEFINE_ERROR

}  // namespace pfa
