#pragma once

#include <stdexcept>
#include <string>

namespace ck {

enum class errc {
    id_out_of_range,
    empty_subspace,
    spec_error,
    unsupported_space,
    not_anti_cech,
    not_a_refinement,
    not_simplicial,
    budget_exceeded,
    invalid_complex,
    broken_chain_map,
    stage_out_of_range,
    horizon_too_small,
    bad_class,
    oracle_budget,
    empty_complement,
    unsupported_scenario,
    io_error,
    config_error,
    internal_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::id_out_of_range: return "IdOutOfRange";
    case errc::empty_subspace: return "EmptySubspace";
    case errc::spec_error: return "SpecError";
    case errc::unsupported_space: return "UnsupportedSpace";
    case errc::not_anti_cech: return "NotAntiCech";
    case errc::not_a_refinement: return "NotARefinement";
    case errc::not_simplicial: return "NotSimplicial";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::invalid_complex: return "InvalidComplex";
    case errc::broken_chain_map: return "BrokenChainMap";
    case errc::stage_out_of_range: return "StageOutOfRange";
    case errc::horizon_too_small: return "HorizonTooSmall";
    case errc::bad_class: return "BadClass";
    case errc::oracle_budget: return "OracleBudget";
    case errc::empty_complement: return "EmptyComplement";
    case errc::unsupported_scenario: return "UnsupportedScenario";
    case errc::io_error: return "IoError";
    case errc::config_error: return "ConfigError";
    case errc::internal_error: return "InternalError";
    }
    return "UnknownError";
}

/// Library-wide exception carrying a stable error code plus context.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

} // namespace ck
