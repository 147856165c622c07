// suites.hpp: named states, the verification grid and the built-in suites
// driven by `decolab verify`.

#pragma once

#include "decolab/oracle.hpp"
#include "decolab/random.hpp"

#include <optional>
#include <string>
#include <vector>

namespace decolab {

struct SystemState {
    DenseOperator rho;
    std::optional<Ket> psi;            // set for pure presets
    std::optional<Ensemble> ensemble;  // computational-basis split for maximally_mixed
};

HilbertSpace qubit_register(std::size_t n);

// "ground", "plus_all", "ghz", "maximally_mixed", "encoded" (even qubit
// count: logical |+> on every pair).
SystemState state_preset(const std::string& name, const QubitLattice& lattice);

// One pass/fail row of a suite, shared by every suite.
struct SuiteRow {
    std::string scenario;
    double c2_analytic = 0.0;
    double c2_fitted = 0.0;
    double rel_err = 0.0;
    bool pass = false;
    std::string message;
};

// The scenario grid: L in {1,2}, K in {1,2,4}, T/omega in {0, 0.5, 2}, every
// preset the qubit count allows.
std::vector<Scenario> grid_scenarios();
// Factorized-rate scenarios at converged truncation.
std::vector<Scenario> factorized_scenarios();
std::vector<Scenario> quick_scenarios();
std::vector<Scenario> full_scenarios();

// Shares one H_T decomposition among scenarios with equal dynamics_key.
std::vector<VerificationReport> run_scenarios(const std::vector<Scenario>& scenarios, unsigned jobs);

SuiteRow to_row(const VerificationReport& r);

struct InequalityInstance {
    DenseOperator rho_s;
    Ensemble ensemble;
    DenseOperator h_i;
    DenseOperator rho_env;
};

// Instance 0 is I/2 split into {|+>, |->} under sigma^x coupling; the rest
// are random (density, decomposition, coupling, thermal environment).
InequalityInstance inequality_instance(std::size_t index, std::uint64_t seed);
std::vector<SuiteRow> inequality_suite(std::size_t count, std::uint64_t seed, unsigned jobs);

// Encoded pair states at exactly constant intra-pair correlation (rate 0)
// against the same logical states unencoded (rate >= x |lambda|^2).
std::vector<SuiteRow> encoding_suite();

// "quick", "full", "inequality" or "encoding".
std::vector<SuiteRow> run_suite(const std::string& name, std::uint64_t seed, unsigned jobs);

} // namespace decolab
