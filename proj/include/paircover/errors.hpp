#pragma once

#include <stdexcept>
#include <string>

namespace paircover {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad call-site input: out-of-range index, dimension mismatch, malformed file.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Problem size exceeds a hard enumeration/memory bound (m > 24, M > 24, M > 20).
struct CapacityError : Error {
    using Error::Error;
};

/// Instance admits no pair cover (some ground element has no covering pair).
struct InfeasibleError : Error {
    using Error::Error;
};

/// Numerical integration lost more norm than the tolerance allows.
struct IntegrationError : Error {
    using Error::Error;
};

/// Success probability w = 0 everywhere: no repetition count reaches the target.
struct UnreachableTargetError : Error {
    using Error::Error;
};

/// Construction is only proven for specific parameters (Chimera shore c = 4).
struct UnsupportedParameterError : Error {
    using Error::Error;
};

} // namespace paircover
