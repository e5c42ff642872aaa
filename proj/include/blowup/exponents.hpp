#pragma once

#include <optional>
#include <string>
#include <vector>

namespace blowup {

/// One problem instance of the damped, massive semilinear wave equation
///
///   v_tt - Δv + mu/(1+t) v_t + nu/(1+t)^2 v = |v|^p,  v(0)=0,  v_t(0)=eps*g,
///
/// with radial datum g(r) >= M (1+r)^-(kbar+1). Construction validates the domain.
struct ModelParams {
    int n;
    double mu;
    double nu;
    double p;
    double kbar;
    double M;
    double eps;

    ModelParams(int n, double mu, double nu, double p, double kbar, double M = 1.0, double eps = 1.0);

    /// floor(n/2)
    int m() const noexcept { return n / 2; }

    /// (mu/2)(mu/2 - 1): the mass value that makes the Liouville transform potential-free.
    double critical_mass() const noexcept { return 0.5 * mu * (0.5 * mu - 1.0); }

    ModelParams with_eps(double new_eps) const;
    ModelParams with_amplitude(double new_M) const;
};

/// p_F(h) = 1 + 2/h.
double fujita(double h);

/// Positive root of (d-1)p^2 - (d+1)p - 2 = 0.
double strauss(double d);

/// The decay k0 where fujita(k0 + mu/2) == strauss(n + mu).
double kbar_zero(int n, double mu);

/// Upper end M(n) of the damping interval with known global existence.
double mu_max(int n);

/// min{ p_F(mu), p_F((n+mu-1)/2) }.
double p_bar(int n, double mu);

/// Admissible decay interval [k1, k2] of the global-existence literature,
/// together with any extra caps that apply to the same case.
struct AdmissibleRange {
    double k1 = 0.0;
    double k2 = 0.0;
    bool k1_inclusive = true;
    std::optional<double> p_cap;       ///< global existence needs p below this
    bool p_cap_inclusive = false;
    std::optional<double> kbar_cap;    ///< decay beyond this is reduced to the cap
    std::string case_name;
};

/// Selects the documented (n, mu) case and evaluates k1, k2 there.
/// Throws UncoveredCase for any combination outside the table.
AdmissibleRange admissible_range(int n, double p, double mu);

/// 2(p-1) / (4 - (mu + 2 kbar)(p-1)), no hypothesis check.
double lifespan_exponent_formula(double mu, double kbar, double p);

/// (2/(p-1) - mu/2 - kbar)^-1, the same exponent written as in the iteration threshold.
double iteration_exponent(double mu, double kbar, double p);

/// Lifespan exponent alpha with T(eps) <= C eps^-alpha. Throws PreconditionError
/// naming the failed blow-up hypothesis.
double lifespan_exponent(const ModelParams& params);

/// Names of the blow-up hypotheses that fail for `params` (empty when all hold).
std::vector<std::string> failed_blowup_hypotheses(const ModelParams& params);

enum class RegionKind { BlowUpTheorem1, GlobalExistenceLiterature, Unknown };

std::string to_string(RegionKind kind);

struct RegionVerdict {
    RegionKind kind = RegionKind::Unknown;
    std::optional<double> lifespan_exponent;
    std::vector<std::string> active_constraints;
};

RegionVerdict classify(const ModelParams& params);

/// Closed interval [lo, hi] sampled at `count` equispaced nodes.
struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;

    std::vector<double> nodes() const;
};

struct CurvePoint {
    double kbar;
    double p;
};

struct Atlas {
    int n = 0;
    double mu = 0.0;
    double nu = 0.0;
    std::vector<double> kbar_nodes;
    std::vector<double> p_nodes;
    /// verdicts[ip * kbar_nodes.size() + ik]
    std::vector<RegionVerdict> verdicts;
    /// (kbar_zero(n,mu), strauss(n+mu)), where the Fujita curve crosses the Strauss line.
    CurvePoint strauss_couple{};
    /// Samples of p = fujita(kbar + mu/2) over the kbar range.
    std::vector<CurvePoint> fujita_curve;
    double strauss_line = 0.0;

    const RegionVerdict& at(std::size_t ik, std::size_t ip) const {
        return verdicts[ip * kbar_nodes.size() + ik];
    }
};

inline constexpr int kDefaultCurveSamples = 512;

Atlas atlas(int n, double mu, double nu, const RangeSpec& k_grid, const RangeSpec& p_grid,
            int curve_samples = kDefaultCurveSamples);

}  // namespace blowup
