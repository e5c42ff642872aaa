#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blowup/exponents.hpp"

namespace blowup {

/// Parameters of the iteration argument. `delta_m` is the free-wave comparison
/// constant of the radial lower-bound lemma; its true value depends on n and is not
/// computed here, so every bound derived from it is conditional on the input.
struct BoundConfig {
    double delta = 1.0;
    double delta_m = 1.0;
    ModelParams params;

    BoundConfig(ModelParams params, double delta = 1.0, double delta_m = 1.0);
};

/// Lower-bound ansatz u >= C t^a / (r^m (r+t)^b) at iteration index k.
struct IterationState {
    int k = 1;
    double a = 0.0;
    double b = 0.0;
    double logC = 0.0;
};

struct IterationConstants {
    double K = 0.0;
    double logK = 0.0;
    double S_limit = 0.0;
    int k_star = 0;               ///< index attaining the minimum, or 0 when it is the k -> inf limit
    bool attained_in_limit = false;
    double logC0 = 0.0;
};

struct LifespanBound {
    double C = 0.0;
    double logC = 0.0;
    double exponent = 0.0;
    double T_upper = 0.0;
    double log_T_upper = 0.0;
    IterationConstants constants;
};

/// (t, r) lies in the blow-up set: r - t >= max{2t/delta_m, delta}.
bool in_sigma(double t, double r, const BoundConfig& cfg);

/// log C0 with C0 = eps 2^(m-2) M delta_m^-m (delta/(1+delta))^(kbar+1).
double seed_constant(const BoundConfig& cfg);

/// State k = 1: (m+1, kbar+1, log C0).
IterationState seed_state(const BoundConfig& cfg);

/// One step of the (a, b, C) recursion; C is carried as log C.
IterationState iterate(const IterationState& state, const BoundConfig& cfg);

/// (a_k, b_k) from the closed forms; k = 1 reproduces the seeds.
std::pair<double, double> closed_form(int k, const BoundConfig& cfg);

/// K = inf_k p^(2k) / (2^(p+1) (p a_k + 2)^2) including the k -> inf limit, and
/// S_limit = sum_{j>=1} (j log p^2 - log K) / p^j.
IterationConstants derive_K(const BoundConfig& cfg, int k_max = 60);

/// log C0 - S + (m+1-mu/2+2/(p-1)) log t - (kbar+1+m) log(r+t); requires t > 1.
double J(double t, double r, const IterationConstants& consts, const BoundConfig& cfg);

/// Explicit lifespan constant C and T_upper = C eps^-alpha.
LifespanBound lifespan_upper_bound(const BoundConfig& cfg, int k_max = 60);

/// Hypotheses of the lifespan bound that fail for `cfg` (empty when all hold).
std::vector<std::string> failed_bound_hypotheses(const ModelParams& params);

/// eps/(8 r^m) * int_{r-t}^{r+t} lambda^m M (1+lambda)^-(kbar+1) dlambda, adaptive quadrature.
double free_lower_bound(double t, double r, const BoundConfig& cfg);

struct StepSample {
    double t = 0.0;
    double r = 0.0;
    double log_lhs = 0.0;  ///< log of the Duhamel integral of the ansatz
    double log_rhs = 0.0;  ///< log of C* t^a* / (r^m (r+t)^b*)
    double ratio = 0.0;
};

struct StepReport {
    std::vector<StepSample> samples;
    double worst_ratio = 0.0;
    bool pass = false;
};

/// Checks one iteration step by quadrature: the Duhamel term with the ansatz of
/// `state` plugged in dominates the next ansatz at each sample. Samples must lie
/// in the blow-up set with t > 1. `slack` is the relative tolerance on ratio >= 1.
StepReport verify_iteration_step(const IterationState& state, const std::vector<std::pair<double, double>>& samples,
                                 const BoundConfig& cfg, double slack = 1e-6, unsigned jobs = 1);

}  // namespace blowup
