#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace saddle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library. Each subclass maps to
/// one failure mode so callers (and the CLI exit-code table) can dispatch on
/// type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SADDLE_DEFINE_ERROR(Name)              \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

SADDLE_DEFINE_ERROR(DomainViolation);
SADDLE_DEFINE_ERROR(InvalidArgument);
SADDLE_DEFINE_ERROR(NonFiniteIterate);
SADDLE_DEFINE_ERROR(InnerSolveFailure);
SADDLE_DEFINE_ERROR(ZeroProjection);
SADDLE_DEFINE_ERROR(SingularMatrix);
SADDLE_DEFINE_ERROR(NotAFixedPoint);
SADDLE_DEFINE_ERROR(EigensolverFailure);
SADDLE_DEFINE_ERROR(RepeatedEigenvalues);
SADDLE_DEFINE_ERROR(RowSumMismatch);
SADDLE_DEFINE_ERROR(ConfigError);
SADDLE_DEFINE_ERROR(IoError);

#undef SADDLE_DEFINE_ERROR

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace saddle
