#include "blowup/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blowup/error.hpp"
#include "blowup/parallel.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("fit_power_law: x and y differ in length");
    if (x.size() < 2) throw DomainError("fit_power_law: need at least two points");
    const auto n = static_cast<double>(x.size());
    std::vector<double> lx(x.size());
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_power_law: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DomainError("fit_power_law: x values are all equal");
    PowerLawFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (fit.slope * lx[i] + fit.intercept);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ConfigError("eps", "geometric grid needs 0 < lo < hi, count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double ratio = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

void SweepSpec::validate() const {
    if (eps_values.size() < 4) throw ConfigError("eps", "a sweep needs at least 4 eps values");
    for (std::size_t i = 0; i < eps_values.size(); ++i) {
        if (!(eps_values[i] > 0.0)) throw ConfigError("eps", "eps values must be > 0");
        if (i > 0 && !(eps_values[i] > eps_values[i - 1])) {
            throw ConfigError("eps", "eps values must be strictly increasing");
        }
    }
    if (refinement_levels < 1) throw ConfigError("refinement_levels", "refinement_levels must be >= 1");
    grid.validate();
    const auto failed = failed_blowup_hypotheses(params_base);
    if (!failed.empty()) throw PreconditionError(failed.front(), "sweep requires blow-up hypotheses: " + failed.front());
}

bool SweepResult::pass(double slope_tol, double r2_min) const {
    if (!complete) return false;
    return std::abs(slope + alpha_theory) <= slope_tol * alpha_theory && r_squared >= r2_min;
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t n_eps = spec.eps_values.size();
    const auto n_levels = static_cast<std::size_t>(spec.refinement_levels) + 1;

    std::vector<GridSpec> grids(n_levels);
    grids[0] = spec.grid;
    grids[0].snapshot_every = 0;
    for (std::size_t l = 1; l < n_levels; ++l) grids[l] = grids[l - 1].refined();

    // One work item per (eps, level); slots are fixed so the result is order independent.
    std::vector<SolverRun> runs;
    runs.reserve(n_eps * n_levels);
    for (std::size_t e = 0; e < n_eps; ++e) {
        for (std::size_t l = 0; l < n_levels; ++l) {
            runs.push_back(SolverRun{.form = spec.form, .params = spec.params_base.with_eps(spec.eps_values[e]),
                                     .grid = grids[l]});
        }
    }
    parallel_for(runs.size(), spec.jobs, [&](std::size_t i) {
        const auto& slot = runs[i];
        runs[i] = run(slot.form, slot.params, slot.grid);
    });

    SweepResult res;
    res.alpha_theory = lifespan_exponent(spec.params_base);
    res.complete = true;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t e = 0; e < n_eps; ++e) {
        SweepPoint pt;
        pt.eps = spec.eps_values[e];
        pt.blew_up = true;
        for (std::size_t l = 0; l < n_levels; ++l) {
            const auto& r = runs[e * n_levels + l];
            pt.T_levels.push_back(r.T_num);
            pt.blew_up = pt.blew_up && r.blew_up();
        }
        pt.T_num = pt.T_levels.back();
        const double coarse = pt.T_levels[pt.T_levels.size() - 2];
        pt.refinement_agreement = std::abs(pt.T_num - coarse) / pt.T_num;
        if (pt.blew_up) {
            xs.push_back(pt.eps);
            ys.push_back(pt.T_num);
        } else {
            res.complete = false;
            res.survived_eps.push_back(pt.eps);
        }
        res.points.push_back(std::move(pt));
    }
    if (!res.complete) res.message = "some eps survived t_max: increase t_max or eps";
    if (xs.size() >= 2) {
        const auto fit = fit_power_law(xs, ys);
        res.slope = fit.slope;
        res.intercept = fit.intercept;
        res.r_squared = fit.r_squared;
    } else {
        res.slope = res.intercept = res.r_squared = std::nan("");
    }
    return res;
}

std::string to_string(BoundStatus s) {
    switch (s) {
        case BoundStatus::Pass: return "pass";
        case BoundStatus::Fail: return "fail";
        case BoundStatus::Vacuous: return "vacuous";
        case BoundStatus::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

UpperBoundReport check_upper_bound(const SweepResult& result, const SweepSpec& spec, const BoundConfig& cfg) {
    UpperBoundReport rep;
    rep.delta = cfg.delta;
    rep.delta_m = cfg.delta_m;
    rep.all_pass = true;
    const double dt = spec.grid.dt();
    for (const auto& pt : result.points) {
        const BoundConfig at_eps(spec.params_base.with_eps(pt.eps), cfg.delta, cfg.delta_m);
        const auto bound = lifespan_upper_bound(at_eps);
        rep.C = bound.C;
        rep.exponent = bound.exponent;
        BoundComparison row{pt.eps, pt.T_num, bound.T_upper, BoundStatus::Inconclusive};
        if (bound.T_upper < dt) {
            row.status = BoundStatus::Vacuous;
        } else if (pt.blew_up) {
            row.status = pt.T_num <= bound.T_upper ? BoundStatus::Pass : BoundStatus::Fail;
        } else if (spec.grid.t_max > bound.T_upper) {
            // Survived past the bound.
            row.status = BoundStatus::Fail;
        }
        if (row.status == BoundStatus::Fail || row.status == BoundStatus::Inconclusive) rep.all_pass = false;
        rep.rows.push_back(row);
    }
    return rep;
}

UpperBoundReport check_upper_bound(const SweepSpec& spec, const BoundConfig& cfg) {
    return check_upper_bound(sweep(spec), spec, cfg);
}

Datum compact_bump(double radius) {
    if (!(radius > 0.0)) throw DomainError("compact_bump requires radius > 0");
    return [radius](double r) {
        const double x = r / radius;
        if (x >= 1.0) return 0.0;
        const double w = 1.0 - x * x;
        const double w2 = w * w;
        return w2 * w2 * w2;
    };
}

double free_wave_3d(double t, double r, const Datum& g) {
    if (!(t >= 0.0) || !(r >= 0.0)) throw DomainError("free_wave_3d requires t, r >= 0");
    if (t == 0.0) return 0.0;
    // Below this radius the average over [t-r, t+r] equals its midpoint value to
    // O(r^2), far under the quadrature tolerance.
    if (r <= 1e-7 * std::max(1.0, t)) return t * g(t);
    auto f = [&](double lambda) { return lambda * g(lambda); };
    return integrate(f, std::abs(r - t), r + t, 1e-12) / (2.0 * r);
}

ConvergenceReport convergence_study(const ConvergenceSpec& spec) {
    if (spec.levels < 3) throw ConfigError("levels", "convergence study needs at least 3 levels");
    spec.grid.validate();
    const auto L = static_cast<std::size_t>(spec.levels);

    ConvergenceReport rep;
    rep.exact_reference = static_cast<bool>(spec.reference);
    const double dt0 = spec.grid.dt();
    const int steps0 = std::max(1, static_cast<int>(std::lround(spec.comparison_time / dt0)));
    rep.comparison_time = steps0 * dt0;

    std::vector<GridSpec> grids(L);
    grids[0] = spec.grid;
    for (std::size_t l = 1; l < L; ++l) grids[l] = grids[l - 1].refined();

    std::vector<SolverRun> profile_runs(L, SolverRun{.form = spec.form, .params = spec.params, .grid = spec.grid});
    std::vector<SolverRun> blowup_runs(spec.track_blowup ? L : 0,
                                       SolverRun{.form = spec.form, .params = spec.params, .grid = spec.grid});
    const std::size_t items = L + blowup_runs.size();
    parallel_for(items, spec.jobs, [&](std::size_t i) {
        if (i < L) {
            GridSpec g = grids[i];
            g.snapshot_every = steps0 << i;
            // r_max stays tied to the original horizon so the grids agree node-for-node.
            if (g.r_max == 0.0) g.r_max = spec.grid.effective_r_max();
            g.t_max = rep.comparison_time;
            profile_runs[i] = run(spec.form, spec.params, g, spec.options);
        } else {
            GridSpec g = grids[i - L];
            g.snapshot_every = 0;
            blowup_runs[i - L] = run(spec.form, spec.params, g, spec.options);
        }
    });

    for (std::size_t l = 0; l < L; ++l) {
        rep.dr.push_back(grids[l].dr);
        const auto& r = profile_runs[l];
        if (r.blew_up()) {
            throw ConfigError("comparison_time",
                              "solution blew up before the comparison time; choose a smaller comparison time");
        }
    }

    auto final_profile = [&](std::size_t l) -> const std::vector<double>& {
        return profile_runs[l].snapshots.back().u;
    };
    const std::size_t coarse_nodes = final_profile(0).size();
    auto sample = [&](std::size_t l, std::size_t i) { return final_profile(l)[i << l]; };

    if (rep.exact_reference) {
        for (std::size_t l = 0; l < L; ++l) {
            double err = 0.0;
            for (std::size_t i = 0; i < coarse_nodes; ++i) {
                const double r = static_cast<double>(i) * spec.grid.dr;
                err = std::max(err, std::abs(sample(l, i) - spec.reference(rep.comparison_time, r)));
            }
            rep.profile_errors.push_back(err);
        }
    } else {
        for (std::size_t l = 0; l + 1 < L; ++l) {
            double diff = 0.0;
            for (std::size_t i = 0; i < coarse_nodes; ++i) diff = std::max(diff, std::abs(sample(l, i) - sample(l + 1, i)));
            rep.profile_errors.push_back(diff);
        }
    }
    for (std::size_t k = 0; k + 1 < rep.profile_errors.size(); ++k) {
        rep.profile_orders.push_back(std::log2(rep.profile_errors[k] / rep.profile_errors[k + 1]));
    }
    rep.pass = !rep.profile_orders.empty() &&
               std::all_of(rep.profile_orders.begin(), rep.profile_orders.end(),
                           [](double o) { return o >= 1.5 && o <= 2.5; });

    if (spec.track_blowup) {
        bool all_blew = true;
        for (const auto& r : blowup_runs) {
            rep.T_num.push_back(r.T_num);
            all_blew = all_blew && r.blew_up();
        }
        if (all_blew) {
            rep.T_agreement_finest = std::abs(rep.T_num[L - 1] - rep.T_num[L - 2]) / rep.T_num[L - 1];
            for (std::size_t l = 0; l + 2 < L; ++l) {
                rep.T_orders.push_back(
                    std::log2(std::abs(rep.T_num[l] - rep.T_num[l + 1]) / std::abs(rep.T_num[l + 1] - rep.T_num[l + 2])));
            }
        }
    }
    return rep;
}

}  // namespace blowup
