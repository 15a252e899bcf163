#pragma once

#include <stdexcept>

namespace jitcluster {

// Precondition violations throw std::invalid_argument. The two types below
// carry conditions the CLI maps to distinct exit codes.

/// A search or enumeration exceeded its configured size guard.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The entangling procedure cannot realise the requested cluster geometry
/// (vertical edges need c2 <= 1 unless the gate is broker-client).
class UnsupportedConstruction : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace jitcluster
