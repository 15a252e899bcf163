#include "jitcluster/gates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace jitcluster {

namespace {

const std::array<EntanglingProcedure, 5>& builtin() {
    static const std::array<EntanglingProcedure, 5> table{{
        {"fusion1", "Type-I fusion", 2, 2, false},
        {"fusion2", "Type-II fusion", 3, 2, false},
        {"dh", "Double-heralding", 1, 1, false},
        {"rus", "Repeat-until-success", 1, 0, false},
        {"bc", "Broker-client", 0, 0, true},
    }};
    return table;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

void validate(const EntanglingProcedure& proc) {
    if (proc.c1 < 0 || proc.c2 < 0) {
        throw std::invalid_argument("entangling procedure '" + proc.name + "': c1 and c2 must be nonnegative");
    }
    if (proc.broker_client && (proc.c1 != 0 || proc.c2 != 0)) {
        throw std::invalid_argument("entangling procedure '" + proc.name + "': broker-client requires c1 = c2 = 0");
    }
}

EntanglingProcedure make_procedure(std::string key, std::string name, int c1, int c2, bool broker_client) {
    EntanglingProcedure proc{std::move(key), std::move(name), c1, c2, broker_client};
    validate(proc);
    return proc;
}

std::span<const EntanglingProcedure> catalog() { return builtin(); }

const EntanglingProcedure& procedure_by_name(std::string_view name) {
    for (const auto& proc : builtin()) {
        if (iequals(name, proc.key) || iequals(name, proc.name)) {
            return proc;
        }
    }
    throw std::invalid_argument("unknown entangling procedure '" + std::string(name) +
                                "' (expected fusion1, fusion2, dh, rus or bc)");
}

namespace procedures {
const EntanglingProcedure& type_i_fusion() { return builtin()[0]; }
const EntanglingProcedure& type_ii_fusion() { return builtin()[1]; }
const EntanglingProcedure& double_heralding() { return builtin()[2]; }
const EntanglingProcedure& repeat_until_success() { return builtin()[3]; }
const EntanglingProcedure& broker_client() { return builtin()[4]; }
}  // namespace procedures

}  // namespace jitcluster
