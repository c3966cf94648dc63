#pragma once

#include <stdexcept>
#include <string>

namespace hhpsi {

/// Base class for all library errors.  The CLI maps the concrete type to a
/// process exit code, so throw the most specific one that applies.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed user input: unparsable fraction or complex literal, bad flag
/// combinations, out-of-range orders.  CLI exit code 1.
struct invalid_input : error {
    using error::error;
};

/// Structurally valid request that falls outside what the series machinery
/// supports: non-viable regimes (integrable, logarithmic, repeated or
/// negative resonances), resummation of series whose exponents have negative
/// real part, divergent variational integrals.  CLI exit code 2.
struct out_of_scope : error {
    using error::error;
};

/// A quantitative self-check failed: resonance compatibility residual above
/// tolerance, certificate bound violated at a sampled point, internal
/// consistency check tripped.  CLI exit code 3.
struct verification_failure : error {
    using error::error;
};

} // namespace hhpsi
