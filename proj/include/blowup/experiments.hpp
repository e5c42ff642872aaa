#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/bound_engine.hpp"
#include "blowup/exponents.hpp"
#include "blowup/solver.hpp"

namespace blowup {

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Unweighted least squares of log y = slope * log x + intercept. Needs >= 2 positive points.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct SweepSpec {
    ModelParams params_base;          ///< eps is replaced by each entry of eps_values
    std::vector<double> eps_values;   ///< strictly increasing, >= 4 entries
    GridSpec grid;
    int refinement_levels = 1;        ///< number of grid halvings on top of `grid`
    Form form = Form::UForm;
    unsigned jobs = 0;                ///< 0 = hardware concurrency

    void validate() const;
};

/// Geometric grid of `count` values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int count);

struct SweepPoint {
    double eps = 0.0;
    double T_num = 0.0;                ///< finest-level value
    double refinement_agreement = 0.0; ///< |T_finest - T_next| / T_finest
    bool blew_up = false;
    std::vector<double> T_levels;      ///< coarse to fine
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double alpha_theory = 0.0;
    bool complete = false;             ///< every eps blew up before t_max
    std::vector<double> survived_eps;
    std::string message;

    /// |slope + alpha| <= tol * alpha, r^2 >= r2_min and complete.
    bool pass(double slope_tol = 0.25, double r2_min = 0.95) const;
};

SweepResult sweep(const SweepSpec& spec);

enum class BoundStatus { Pass, Fail, Vacuous, Inconclusive };

std::string to_string(BoundStatus s);

struct BoundComparison {
    double eps = 0.0;
    double T_num = 0.0;
    double T_upper = 0.0;
    BoundStatus status = BoundStatus::Inconclusive;
};

struct UpperBoundReport {
    std::vector<BoundComparison> rows;
    double C = 0.0;
    double exponent = 0.0;
    double delta = 0.0;
    double delta_m = 0.0;
    bool conditional_on_delta_m = true;
    bool all_pass = false;             ///< no row is Fail or Inconclusive
};

/// Compares a finished sweep against T_upper = C eps^-alpha; `cfg.params.eps` is ignored.
UpperBoundReport check_upper_bound(const SweepResult& result, const SweepSpec& spec, const BoundConfig& cfg);

/// Runs the sweep, then compares.
UpperBoundReport check_upper_bound(const SweepSpec& spec, const BoundConfig& cfg);

/// (1 - (r/R)^2)^6 on [0, R), zero beyond: a C^5 compactly supported datum.
Datum compact_bump(double radius);

/// Exact n = 3 free wave with u(0)=0, u_t(0)=g: (1/(2r)) int_{|r-t|}^{r+t} lambda g(lambda) dlambda.
double free_wave_3d(double t, double r, const Datum& g);

/// Exact solution u(t, r) used as a convergence reference.
using Reference = std::function<double(double, double)>;

struct ConvergenceSpec {
    ModelParams params;
    GridSpec grid;                     ///< coarsest level
    int levels = 3;
    double comparison_time = 1.0;      ///< rounded to a multiple of the coarsest dt
    Form form = Form::UForm;
    RunOptions options;
    Reference reference;               ///< empty -> self-convergence between levels
    bool track_blowup = false;         ///< also compare T_num up to grid.t_max
    unsigned jobs = 0;
};

struct ConvergenceReport {
    std::vector<double> dr;
    double comparison_time = 0.0;
    std::vector<double> profile_errors;  ///< vs reference, or max |u_l - u_{l+1}|
    std::vector<double> profile_orders;
    std::vector<double> T_num;           ///< per level when track_blowup
    std::vector<double> T_orders;
    std::optional<double> T_agreement_finest;
    bool exact_reference = false;
    bool pass = false;                   ///< every profile order in [1.5, 2.5]
};

ConvergenceReport convergence_study(const ConvergenceSpec& spec);

}  // namespace blowup
