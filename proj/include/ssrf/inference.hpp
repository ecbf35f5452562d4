#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ssrf/kernels.hpp"
#include "ssrf/quadrature.hpp"
#include "ssrf/sample_constraints.hpp"
#include "ssrf/spectral.hpp"

namespace ssrf {

struct FitConfig {
    double beta = 1.0;
    int max_iterations = 2000;
    double simplex_tolerance = 1e-10;
    double eta1_lower_bound = -2.0 + 1e-6;
    int restarts = 0;
    /// Keep kc at its initial value 2 pi / a.
    bool freeze_kc = false;
    /// Seed of the restart jitter.
    std::uint64_t seed = 0;
    ConstraintOptions constraints;

    void validate() const;
};

/// Shape parameters (eta1, xi, kc); eta0 does not enter the objective.
struct ThetaPrime {
    double eta1 = 1.0;
    double xi = 1.0;
    double kc = 1.0;
};

inline constexpr double kPenaltyScale = 1e6;

struct ObjectiveTerms {
    double phi = 0.0;
    std::array<double, 3> z{};
    bool penalized = false;
};

/// z1 = S0', z2 = (S0/S1)(E[S1]/E[S0]), z3 = (S1/S2)(E[S2]/E[S1]) with Phi = sum (1 - z^{1/beta})^2.
/// E[S1], E[S2] are halved to match the scaling of the sample-side phi estimates.
/// Impermissible or unevaluable theta' yields kPenaltyScale * (1 + violation).
ObjectiveTerms objective_terms(const ThetaPrime& theta, const ConstraintEstimates& c, double beta,
                               const QuadratureConfig& q = {}, double eta1_lower_bound = -2.0 + 1e-6);

double objective_phi(const ThetaPrime& theta, const ConstraintEstimates& c, double beta,
                     const QuadratureConfig& q = {}, double eta1_lower_bound = -2.0 + 1e-6);

struct InitialGuess {
    ThetaPrime theta;
    bool xi_fallback = false;  // S2 <= 0, xi taken as a1
};

/// eta1 = 1, xi = sqrt(S1/S2), kc = 2 pi / a1.
InitialGuess initial_guess(const ConstraintEstimates& c);

struct LocalSolution {
    ThetaPrime start;
    ThetaPrime theta;
    double phi = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitResult {
    SsrfParams params;
    double phi_value = 0.0;
    int iterations = 0;
    bool converged = false;
    ConstraintEstimates constraints_used;
    std::array<double, 3> z_values{};
    std::vector<std::string> warnings;
    std::vector<LocalSolution> local_solutions;
    /// Best objective after each simplex iteration of the winning run.
    std::vector<double> trace;
};

/// Minimize Phi from precomputed constraints; eta0 recovered from S0.
FitResult fit_constraints(const ConstraintEstimates& c, const FitConfig& config, const QuadratureConfig& q = {});

FitResult fit_ssrf(const SampleData& data, const KernelSpec& spec, const FitConfig& config = {},
                   const QuadratureConfig& q = {});

}  // namespace ssrf
