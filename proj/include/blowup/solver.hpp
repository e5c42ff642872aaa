#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowup/exponents.hpp"

namespace blowup {

/// UForm: u_tt - u_rr - (n-1)/r u_r = (1+t)^(-mu(p-1)/2)|u|^p + ((mu/2)(mu/2-1) - nu) u/(1+t)^2.
/// VForm: the damped equation for v with u = (1+t)^(mu/2) v.
enum class Form { UForm, VForm };

std::string to_string(Form form);
Form form_from_string(const std::string& s);

/// Uniform radial grid r_i = i*dr on [0, r_max], dt = cfl*dr.
struct GridSpec {
    double dr = 0.05;
    double cfl = 0.9;
    double r_max = 0.0;            ///< 0 selects r_obs + t_max/cfl + 2 dr
    double t_max = 10.0;
    double u_threshold = 1e8;
    double r_obs = 10.0;           ///< observation radius; blow-up is monitored on [0, r_obs]
    int snapshot_every = 0;        ///< store a profile every k steps; 0 disables snapshots

    double dt() const noexcept { return cfl * dr; }
    double effective_r_max() const noexcept;
    /// Throws ConfigError naming the field.
    void validate() const;
    /// Same grid with dr halved (dt follows); r_max, t_max and snapshot times kept.
    GridSpec refined() const;
};

/// Radial datum g(r); the initial velocity is eps*g.
using Datum = std::function<double(double)>;

/// M (1+r)^-(kbar+1).
double initial_data(double r, const ModelParams& params);

/// Source term of the chosen form. VForm returns |v|^p; damping and mass live in the stencil.
double rhs(Form form, double t, double u, const ModelParams& params);

struct RunOptions {
    Datum datum;                   ///< empty -> initial_data
    bool linear = false;           ///< drop the |u|^p nonlinearity (free-wave checks)
};

/// Two consecutive time levels of the discrete solution.
struct WaveState {
    int step = 0;                  ///< index of `cur`
    double t = 0.0;                ///< time of `cur`
    std::vector<double> prev;
    std::vector<double> cur;
};

/// Levels 0 and 1 from u(0)=0, u_t(0)=eps*g; second-order accurate.
WaveState initial_state(Form form, const ModelParams& params, const GridSpec& grid, const RunOptions& options = {});

/// One leapfrog step. Non-finite values are propagated, not reported.
WaveState step(const WaveState& state, Form form, const GridSpec& grid, const ModelParams& params,
               const RunOptions& options = {});

/// Overwrites `next` with the level after `state`; avoids allocation in the run loop.
void step_into(const WaveState& state, WaveState& next, Form form, const GridSpec& grid, const ModelParams& params,
               const RunOptions& options = {});

enum class Outcome { BlewUp, Survived };

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;         ///< nodes 0..i_obs
};

struct SolverRun {
    Form form = Form::UForm;
    ModelParams params;
    GridSpec grid;
    Outcome outcome = Outcome::Survived;
    double T_num = 0.0;            ///< blow-up time, or t_max when Survived
    int steps = 0;
    double max_amplitude = 0.0;
    std::vector<Snapshot> snapshots;
    std::vector<std::pair<double, double>> max_amplitude_history;  ///< (t, max|u|) per snapshot

    bool blew_up() const noexcept { return outcome == Outcome::BlewUp; }
};

SolverRun run(Form form, const ModelParams& params, const GridSpec& grid, const RunOptions& options = {});

/// Discrete energy sum r^(n-1) (u_t^2 + u_r^2) dr of `state` (u_t centered, u_r at half nodes).
double discrete_energy(const WaveState& state, const WaveState& next, int n, const GridSpec& grid);

struct TransformReport {
    double max_rel_discrepancy = 0.0;  ///< max |u - (1+t)^(mu/2) v| / max |u| over sampled (t, r)
    double max_initial_abs = 0.0;      ///< max |u|, |v| at t = 0
    int compared_snapshots = 0;
};

/// Solves both forms on the same grid and compares u with (1+t)^(mu/2) v at common snapshots.
TransformReport transform_check(const ModelParams& params, const GridSpec& grid, const RunOptions& options = {});

}  // namespace blowup
