#include "blowup/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blowup/error.hpp"

namespace blowup {

namespace {

double abs_pow(double u, double p) {
    if (u == 0.0) return 0.0;
    return std::exp(p * std::log(std::abs(u)));
}

// Leapfrog stepper with the stencil coefficients of one grid cached.
class Stepper {
public:
    Stepper(Form form, const GridSpec& grid, const ModelParams& params, const RunOptions& options)
        : form_(form), params_(params), linear_(options.linear), dt_(grid.dt()), dr_(grid.dr) {
        const auto nodes = node_count(grid);
        plus_.resize(nodes);
        minus_.resize(nodes);
        for (std::size_t i = 1; i < nodes; ++i) {
            const double c = (params.n - 1.0) / (2.0 * static_cast<double>(i));
            plus_[i] = 1.0 + c;
            minus_[i] = 1.0 - c;
        }
    }

    static std::size_t node_count(const GridSpec& grid) {
        return static_cast<std::size_t>(std::ceil(grid.effective_r_max() / grid.dr - 1e-9)) + 1;
    }

    void advance(const WaveState& s, WaveState& next) const {
        const auto& u = s.cur;
        const auto& um = s.prev;
        const std::size_t N = u.size() - 1;
        next.prev.assign(u.begin(), u.end());
        next.cur.resize(u.size());
        auto& up = next.cur;

        const double t = s.t;
        const double dt2 = dt_ * dt_;
        const double inv_dr2 = 1.0 / (dr_ * dr_);
        const double p = params_.p;
        const double one_t = 1.0 + t;

        if (form_ == Form::UForm) {
            const double nl_coef = linear_ ? 0.0 : std::pow(one_t, -0.5 * params_.mu * (p - 1.0));
            const double pot = (params_.critical_mass() - params_.nu) / (one_t * one_t);
            for (std::size_t i = 1; i < N; ++i) {
                const double lap = (plus_[i] * u[i + 1] - 2.0 * u[i] + minus_[i] * u[i - 1]) * inv_dr2;
                double f = pot * u[i];
                if (nl_coef != 0.0) f += nl_coef * abs_pow(u[i], p);
                up[i] = 2.0 * u[i] - um[i] + dt2 * (lap + f);
            }
        } else {
            const double beta = 0.5 * params_.mu * dt_ / one_t;
            const double mass = params_.nu / (one_t * one_t);
            const double inv = 1.0 / (1.0 + beta);
            for (std::size_t i = 1; i < N; ++i) {
                const double lap = (plus_[i] * u[i + 1] - 2.0 * u[i] + minus_[i] * u[i - 1]) * inv_dr2;
                double f = -mass * u[i];
                if (!linear_) f += abs_pow(u[i], p);
                up[i] = (2.0 * u[i] - (1.0 - beta) * um[i] + dt2 * (lap + f)) * inv;
            }
        }
        // Even closure u_r(t,0) = 0 at second order; outer value frozen.
        up[0] = (4.0 * up[1] - up[2]) / 3.0;
        up[N] = u[N];
        next.step = s.step + 1;
        next.t = static_cast<double>(next.step) * dt_;
    }

private:
    Form form_;
    ModelParams params_;
    bool linear_;
    double dt_;
    double dr_;
    std::vector<double> plus_;
    std::vector<double> minus_;
};

double datum_at(const RunOptions& options, const ModelParams& params, double r) {
    return options.datum ? options.datum(r) : initial_data(r, params);
}

void check_dimension(const ModelParams& params) {
    if (params.n > 5) {
        throw ConfigError("n", "radial solver supports 2 <= n <= 5 (the central stencil is unstable near r=0 for n>=6)");
    }
}

std::size_t obs_index(const GridSpec& grid, std::size_t nodes) {
    const auto i = static_cast<std::size_t>(std::floor(grid.r_obs / grid.dr + 1e-9));
    return std::min(i, nodes - 1);
}

}  // namespace

std::string to_string(Form form) { return form == Form::UForm ? "u" : "v"; }

Form form_from_string(const std::string& s) {
    if (s == "u" || s == "UForm") return Form::UForm;
    if (s == "v" || s == "VForm") return Form::VForm;
    throw ConfigError("form", "form must be 'u' or 'v', got '" + s + "'");
}

double GridSpec::effective_r_max() const noexcept {
    if (r_max > 0.0) return r_max;
    return r_obs + t_max / cfl + 2.0 * dr;
}

void GridSpec::validate() const {
    if (!(dr > 0.0) || !std::isfinite(dr)) throw ConfigError("dr", "dr must be > 0");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl", "cfl must lie in (0, 1]");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max", "t_max must be > 0");
    if (!(r_obs >= 0.0) || !std::isfinite(r_obs)) throw ConfigError("r_obs", "r_obs must be >= 0");
    if (!(u_threshold > 0.0)) throw ConfigError("u_threshold", "u_threshold must be > 0");
    if (snapshot_every < 0) throw ConfigError("snapshot_every", "snapshot_every must be >= 0");
    if (r_max < 0.0) throw ConfigError("r_max", "r_max must be >= 0 (0 selects the default)");
    if (effective_r_max() < r_obs + t_max) {
        throw ConfigError("r_max", "r_max must be >= r_obs + t_max so the observed region never sees the boundary");
    }
    if (effective_r_max() < 3.0 * dr) throw ConfigError("r_max", "grid needs at least four nodes");
}

GridSpec GridSpec::refined() const {
    GridSpec g = *this;
    g.dr = 0.5 * dr;
    if (snapshot_every > 0) g.snapshot_every = 2 * snapshot_every;
    return g;
}

double initial_data(double r, const ModelParams& params) {
    if (!(r >= 0.0)) throw DomainError("initial_data requires r >= 0");
    return params.M * std::pow(1.0 + r, -(params.kbar + 1.0));
}

double rhs(Form form, double t, double u, const ModelParams& params) {
    if (!(t >= 0.0)) throw DomainError("rhs requires t >= 0");
    const double nl = abs_pow(u, params.p);
    if (form == Form::VForm) return nl;
    const double one_t = 1.0 + t;
    return std::pow(one_t, -0.5 * params.mu * (params.p - 1.0)) * nl +
           (params.critical_mass() - params.nu) * u / (one_t * one_t);
}

WaveState initial_state(Form form, const ModelParams& params, const GridSpec& grid, const RunOptions& options) {
    grid.validate();
    check_dimension(params);
    const std::size_t nodes = Stepper::node_count(grid);
    WaveState s;
    s.step = 1;
    const double dt = grid.dt();
    s.t = dt;
    s.prev.assign(nodes, 0.0);
    s.cur.assign(nodes, 0.0);
    // u_tt(0) = 0 for the u-form; the v-form picks up -mu * v_t(0) from the damping.
    const double damping = form == Form::VForm ? 1.0 - 0.5 * params.mu * dt : 1.0;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        const double r = static_cast<double>(i) * grid.dr;
        s.cur[i] = dt * params.eps * datum_at(options, params, r) * damping;
    }
    return s;
}

WaveState step(const WaveState& state, Form form, const GridSpec& grid, const ModelParams& params,
               const RunOptions& options) {
    WaveState next;
    step_into(state, next, form, grid, params, options);
    return next;
}

void step_into(const WaveState& state, WaveState& next, Form form, const GridSpec& grid, const ModelParams& params,
               const RunOptions& options) {
    check_dimension(params);
    if (state.cur.size() != Stepper::node_count(grid) || state.prev.size() != state.cur.size()) {
        throw ConfigError("grid", "state does not match grid");
    }
    Stepper(form, grid, params, options).advance(state, next);
}

SolverRun run(Form form, const ModelParams& params, const GridSpec& grid, const RunOptions& options) {
    SolverRun out{.form = form, .params = params, .grid = grid};
    WaveState s = initial_state(form, params, grid, options);
    const Stepper stepper(form, grid, params, options);
    const std::size_t i_obs = obs_index(grid, s.cur.size());
    const double dt = grid.dt();
    const int n_steps = static_cast<int>(std::ceil(grid.t_max / dt - 1e-9));

    auto amplitude = [&](const std::vector<double>& u) {
        double m = 0.0;
        for (std::size_t i = 0; i <= i_obs; ++i) {
            const double a = std::abs(u[i]);
            if (!std::isfinite(a)) return std::numeric_limits<double>::infinity();
            m = std::max(m, a);
        }
        return m;
    };
    auto record = [&](double t, const std::vector<double>& u, double amp) {
        out.snapshots.push_back({t, std::vector<double>(u.begin(), u.begin() + static_cast<long>(i_obs) + 1)});
        out.max_amplitude_history.emplace_back(t, amp);
    };

    double prev_amp = 0.0;
    if (grid.snapshot_every > 0) record(0.0, s.prev, 0.0);

    WaveState next;
    for (;;) {
        const double amp = amplitude(s.cur);
        out.max_amplitude = std::max(out.max_amplitude, std::isfinite(amp) ? amp : out.max_amplitude);
        if (grid.snapshot_every > 0 && s.step % grid.snapshot_every == 0) record(s.t, s.cur, amp);
        if (!std::isfinite(amp) || amp >= grid.u_threshold) {
            out.outcome = Outcome::BlewUp;
            if (std::isfinite(amp) && amp > prev_amp) {
                out.T_num = (s.t - dt) + dt * (grid.u_threshold - prev_amp) / (amp - prev_amp);
            } else {
                out.T_num = s.t;
            }
            out.T_num = std::min(out.T_num, grid.t_max);
            out.steps = s.step;
            return out;
        }
        if (s.step >= n_steps) break;
        prev_amp = amp;
        stepper.advance(s, next);
        std::swap(s, next);
    }
    out.outcome = Outcome::Survived;
    out.T_num = grid.t_max;
    out.steps = s.step;
    return out;
}

double discrete_energy(const WaveState& state, const WaveState& next, int n, const GridSpec& grid) {
    // state.prev, state.cur, next.cur are levels j-1, j, j+1.
    const auto& um = state.prev;
    const auto& u = state.cur;
    const auto& up = next.cur;
    const double dt = grid.dt();
    const double dr = grid.dr;
    double kinetic = 0.0;
    double potential = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double r = static_cast<double>(i) * dr;
        const double ut = (up[i] - um[i]) / (2.0 * dt);
        kinetic += std::pow(r, n - 1) * ut * ut * dr;
        const double rh = r + 0.5 * dr;
        const double ur = (u[i + 1] - u[i]) / dr;
        potential += std::pow(rh, n - 1) * ur * ur * dr;
    }
    return kinetic + potential;
}

TransformReport transform_check(const ModelParams& params, const GridSpec& grid, const RunOptions& options) {
    GridSpec g = grid;
    if (g.snapshot_every <= 0) g.snapshot_every = 1;
    const SolverRun ur = run(Form::UForm, params, g, options);
    const SolverRun vr = run(Form::VForm, params, g, options);

    TransformReport rep;
    const std::size_t count = std::min(ur.snapshots.size(), vr.snapshots.size());
    double max_u = 0.0;
    double max_diff = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const auto& su = ur.snapshots[k];
        const auto& sv = vr.snapshots[k];
        const double factor = std::pow(1.0 + su.t, 0.5 * params.mu);
        for (std::size_t i = 0; i < su.u.size(); ++i) {
            if (k == 0) rep.max_initial_abs = std::max({rep.max_initial_abs, std::abs(su.u[i]), std::abs(sv.u[i])});
            max_u = std::max(max_u, std::abs(su.u[i]));
            max_diff = std::max(max_diff, std::abs(su.u[i] - factor * sv.u[i]));
        }
    }
    rep.compared_snapshots = static_cast<int>(count);
    rep.max_rel_discrepancy = max_u > 0.0 ? max_diff / max_u : 0.0;
    return rep;
}

}  // namespace blowup
