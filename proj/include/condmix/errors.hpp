#pragma once

#include <stdexcept>
#include <string>

namespace condmix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// interval / linear algebra
struct DomainError : Error { using Error::Error; };          // argument outside a function's domain
struct SingularError : Error { using Error::Error; };        // qr2 first column may contain the origin
struct StabilityError : Error { using Error::Error; };       // enclosure widths beyond the configured budget

// segment dynamics
struct InitError : Error { using Error::Error; };            // degenerate or invalid initial segment
struct OverlapError : Error { using Error::Error; };         // branch draw landed inside the t_* enclosure (abort mode)
struct BranchAmbiguityError : Error { using Error::Error; }; // enclosure straddles the singular line too widely
struct EscapeError : Error { using Error::Error; };          // orbit or segment left the bounding box

// statistics / fitting
struct EmptyEstimate : Error { using Error::Error; };        // ratio requested with zero total weight
struct FitError : Error { using Error::Error; };             // too few points above the noise floor

// geometry
struct EmptyError : Error { using Error::Error; };           // distance on an empty cover

// bayes
struct DegeneratePosteriorError : Error { using Error::Error; }; // all posterior weights vanished

// experiment configuration
struct ConfigError : Error { using Error::Error; };

} // namespace condmix
