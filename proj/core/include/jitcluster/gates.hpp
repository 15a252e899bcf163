#pragma once

#include <span>
#include <string>
#include <string_view>

namespace jitcluster {

/// Cluster-accounting constants of an entangling gate.
///
/// c1 counts qubits that stop contributing to the main buffer length after a
/// successful attempt, c2 the qubits removed after a failed one. A
/// broker-client procedure entangles auxiliary broker qubits, so attempts
/// never consume buffer qubits.
struct EntanglingProcedure {
    std::string key;   // short CLI name, e.g. "dh"
    std::string name;  // display name, e.g. "Double-heralding"
    int c1 = 0;
    int c2 = 0;
    bool broker_client = false;

    friend bool operator==(const EntanglingProcedure&, const EntanglingProcedure&) = default;
};

/// Builds a user-defined procedure; throws std::invalid_argument when c1 or
/// c2 is negative, or when broker_client is set with nonzero costs.
EntanglingProcedure make_procedure(std::string key, std::string name, int c1, int c2, bool broker_client);

void validate(const EntanglingProcedure& proc);

/// The five built-in procedures in table order: Type-I fusion, Type-II
/// fusion, Double-heralding, Repeat-until-success, Broker-client.
std::span<const EntanglingProcedure> catalog();

/// Case-insensitive lookup by key (fusion1, fusion2, dh, rus, bc) or display
/// name. Throws std::invalid_argument for unknown names.
const EntanglingProcedure& procedure_by_name(std::string_view name);

namespace procedures {
const EntanglingProcedure& type_i_fusion();
const EntanglingProcedure& type_ii_fusion();
const EntanglingProcedure& double_heralding();
const EntanglingProcedure& repeat_until_success();
const EntanglingProcedure& broker_client();
}  // namespace procedures

/// Vertical edges are built by X-measuring chain qubits and entangling the
/// resulting cherries; a failed gate may cost at most one further qubit.
inline bool supports_2d_construction(const EntanglingProcedure& proc) { return proc.c2 <= 1; }

}  // namespace jitcluster
