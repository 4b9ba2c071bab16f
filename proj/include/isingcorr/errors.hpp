#pragma once

#include <stdexcept>
#include <string>

namespace isingcorr {

// Error taxonomy shared by all modules.
//
//   domain_error        input outside a routine's contract (pole of Gamma, |zeta| != 1, ...)
//   regime_error        parameters outside the physical regime the library supports
//   degeneracy_error    a structurally required quantity vanished (singular moment matrix,
//                       zero leading coefficient in a recurrence)
//   near_singular_error evaluation point too close to the contour / isotropic line;
//                       callers reroute through a limit procedure
//   convergence_error   a quadrature or series failed to settle within its budget
//   evaluation_error    an integrand produced a non-finite value
//   validation_error    cross-method disagreement beyond tolerance
//   discontinuity_error two-sided limits that must coincide failed to; signals
//                       a defect in the evaluation, not a physical jump

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct regime_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct near_singular_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct discontinuity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace isingcorr
