#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "blowup/bound_engine.hpp"
#include "blowup/error.hpp"
#include "blowup/experiments.hpp"
#include "blowup/solver.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

const ModelParams kHeadline(3, 2, 0, 1.8, 0.5, 1, 5);

GridSpec small_grid(double dr = 0.05, double t_max = 4, double r_obs = 4) {
    GridSpec g;
    g.dr = dr;
    g.t_max = t_max;
    g.r_obs = r_obs;
    return g;
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("initial datum") {
    const ModelParams p(3, 2, 0, 1.8, 1, 1);
    CHECK(initial_data(0, p) == 1.0);
    CHECK(initial_data(0, p.with_amplitude(2.5)) == 2.5);
    CHECK(initial_data(1, p) == doctest::Approx(0.25).epsilon(1e-15));
    double prev = initial_data(0, kHeadline);
    for (double r = 0.1; r < 50; r += 0.1) {
        const double cur = initial_data(r, kHeadline);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(initial_data(-0.1, p), DomainError);
}

TEST_CASE("source term") {
    const ModelParams crit(3, 3, 0.75, 1.8, 0.5);
    for (double t : {0.0, 0.7, 4.0}) {
        for (double u : {-2.0, 0.3, 1.7}) {
            CHECK(rhs(Form::UForm, t, u, crit) ==
                  doctest::Approx(std::pow(1 + t, -1.5 * 0.8) * std::pow(std::abs(u), 1.8)).epsilon(1e-14));
            CHECK(rhs(Form::VForm, t, u, crit) == doctest::Approx(std::pow(std::abs(u), 1.8)).epsilon(1e-14));
        }
    }
    const ModelParams takamura(3, 0, 0, 1.8, 0.5);
    CHECK(rhs(Form::UForm, 2.0, -1.5, takamura) == doctest::Approx(std::pow(1.5, 1.8)).epsilon(1e-14));
    for (auto form : {Form::UForm, Form::VForm}) CHECK(rhs(form, 1.0, 0.0, crit) == 0.0);

    // Subcritical mass leaves a positive potential term u/(1+t)^2 times the gap.
    const ModelParams massless(3, 3, 0.25, 1.8, 0.5);
    CHECK(rhs(Form::UForm, 1.0, 1.0, massless) ==
          doctest::Approx(std::pow(2.0, -1.2) + 0.5 / 4.0).epsilon(1e-14));
}

TEST_CASE("form names round trip") {
    CHECK(form_from_string("u") == Form::UForm);
    CHECK(form_from_string("v") == Form::VForm);
    CHECK(to_string(Form::UForm) == "u");
    CHECK(to_string(Form::VForm) == "v");
    CHECK_THROWS_AS(form_from_string("w"), ConfigError);
}

TEST_CASE("grid validation names the field") {
    auto field_of = [](const GridSpec& g) {
        try {
            g.validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    GridSpec g;
    CHECK(field_of(g).empty());
    g.cfl = 1.2;
    CHECK(field_of(g) == "cfl");
    g = GridSpec{};
    g.dr = 0;
    CHECK(field_of(g) == "dr");
    g = GridSpec{};
    g.r_max = g.r_obs + g.t_max - 1;
    CHECK(field_of(g) == "r_max");
    g = GridSpec{};
    g.t_max = -1;
    CHECK(field_of(g) == "t_max");
    g = GridSpec{};
    CHECK(g.effective_r_max() >= g.r_obs + g.t_max);
    CHECK(g.refined().dr == 0.5 * g.dr);
    CHECK(g.refined().dt() == 0.5 * g.dt());
}

TEST_CASE("dimension limits of the scheme") {
    CHECK_THROWS_AS(run(Form::UForm, ModelParams(6, 2, 0, 1.3, 0.5), small_grid()), ConfigError);
    CHECK_NOTHROW(run(Form::UForm, ModelParams(5, 2, 0, 1.3, 0.5, 1, 0.1), small_grid()));
    CHECK_NOTHROW(run(Form::UForm, ModelParams(2, 2, 0, 1.3, 0.5, 1, 0.1), small_grid()));
}

TEST_CASE("first step") {
    const auto grid = small_grid();
    const auto s = initial_state(Form::UForm, kHeadline, grid);
    CHECK(s.step == 1);
    CHECK(s.t == doctest::Approx(grid.dt()));
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(s.prev[i] == 0.0);
        CHECK(s.cur[i] == doctest::Approx(grid.dt() * kHeadline.eps * initial_data(i * grid.dr, kHeadline)));
    }
    const auto v = initial_state(Form::VForm, kHeadline, grid);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(v.cur[i] == doctest::Approx(s.cur[i] * (1 - 0.5 * kHeadline.mu * grid.dt())));
    }
}

TEST_CASE("zero data stays zero") {
    RunOptions zero{.datum = [](double) { return 0.0; }};
    for (auto form : {Form::UForm, Form::VForm}) {
        auto g = small_grid();
        g.snapshot_every = 10;
        const auto r = run(form, kHeadline, g, zero);
        CHECK(r.outcome == Outcome::Survived);
        CHECK(r.T_num == g.t_max);
        CHECK(r.max_amplitude == 0.0);
        for (const auto& snap : r.snapshots) CHECK(max_abs(snap.u) == 0.0);
    }
}

TEST_CASE("free wave matches the exact solution") {
    const Datum g = compact_bump(2.0);
    const ModelParams params(3, 0, 0, 2, 0);
    const RunOptions linear{.datum = g, .linear = true};
    GridSpec grid = small_grid(0.025, 2.0, 6);
    auto s = initial_state(Form::UForm, params, grid, linear);
    const int steps = static_cast<int>(std::lround(2.0 / grid.dt()));
    while (s.step < steps) s = step(s, Form::UForm, grid, params, linear);
    double err = 0;
    for (std::size_t i = 0; i * grid.dr <= 6.0; ++i) {
        err = std::max(err, std::abs(s.cur[i] - free_wave_3d(s.t, i * grid.dr, g)));
    }
    CHECK(err < 1e-3);
}

TEST_CASE("finite propagation speed") {
    const ModelParams params(3, 2, 0, 1.8, 0.5, 1, 0.5);
    const double r0 = 3.0;
    const Datum base = [&](double r) { return initial_data(r, params); };
    const Datum outside = [&](double r) { return r < r0 ? base(r) : base(r) * (1 + 0.5 * std::sin(r)); };
    const Datum inside = [&](double r) { return r < r0 ? base(r) + compact_bump(r0)(r) : base(r); };
    GridSpec grid = small_grid(0.05, 3.0, 12);
    const RunOptions a{.datum = base};
    const RunOptions b{.datum = outside};
    const RunOptions c{.datum = inside};
    auto sa = initial_state(Form::UForm, params, grid, a);
    auto sb = initial_state(Form::UForm, params, grid, b);
    auto sc = initial_state(Form::UForm, params, grid, c);
    const auto i0 = static_cast<std::size_t>(std::lround(r0 / grid.dr));
    const std::size_t nodes = sa.cur.size();
    while (sa.t < grid.t_max) {
        // The stencil carries information one node per step.
        const auto reach = static_cast<std::size_t>(sa.step);
        for (std::size_t i = 0; i + reach + 1 < i0; ++i) REQUIRE(sa.cur[i] == sb.cur[i]);
        for (std::size_t i = i0 + reach + 1; i < nodes; ++i) REQUIRE(sa.cur[i] == sc.cur[i]);
        sa = step(sa, Form::UForm, grid, params, a);
        sb = step(sb, Form::UForm, grid, params, b);
        sc = step(sc, Form::UForm, grid, params, c);
    }
    CHECK(sa.cur[0] != sb.cur[0]);
}

TEST_CASE("headline instance blows up robustly") {
    GridSpec grid = small_grid(0.05, 10, 10);
    const auto coarse = run(Form::UForm, kHeadline, grid);
    REQUIRE(coarse.blew_up());
    CHECK(std::isfinite(coarse.T_num));
    CHECK(coarse.T_num <= grid.t_max);
    CHECK(coarse.max_amplitude >= grid.u_threshold);

    const auto fine = run(Form::UForm, kHeadline, grid.refined());
    REQUIRE(fine.blew_up());
    CHECK(std::abs(fine.T_num - coarse.T_num) / fine.T_num < 0.05);

    GridSpec high = grid;
    high.u_threshold = 1e10;
    const auto late = run(Form::UForm, kHeadline, high);
    REQUIRE(late.blew_up());
    CHECK(late.T_num >= coarse.T_num);
    CHECK((late.T_num - coarse.T_num) / coarse.T_num < 0.02);
}

TEST_CASE("solution stays positive in the blow-up set before blow-up") {
    GridSpec grid = small_grid(0.05, 6, 20);
    grid.snapshot_every = 20;
    const ModelParams params(3, 2, 0, 1.8, 0.5, 1, 1);
    const auto r = run(Form::UForm, params, grid);
    for (const auto& snap : r.snapshots) {
        if (snap.t <= 0) continue;
        for (std::size_t i = 0; i < snap.u.size(); ++i) {
            const double rad = i * grid.dr;
            if (rad - snap.t >= std::max(2 * snap.t, 1.0)) CHECK(snap.u[i] > -1e-8);
        }
    }
}

TEST_CASE("discrete energy of a free wave is conserved") {
    const Datum g = compact_bump(2.0);
    const ModelParams params(3, 0, 0, 2, 0);
    const RunOptions linear{.datum = g, .linear = true};
    GridSpec grid = small_grid(0.05, 10, 0);
    grid.r_max = 25;
    auto s = initial_state(Form::UForm, params, grid, linear);
    auto next = step(s, Form::UForm, grid, params, linear);
    const double e0 = discrete_energy(s, next, 3, grid);
    double worst = 0;
    while (next.t < 10.0) {
        s = next;
        next = step(s, Form::UForm, grid, params, linear);
        worst = std::max(worst, std::abs(discrete_energy(s, next, 3, grid) - e0) / e0);
    }
    CHECK(e0 > 0);
    CHECK(worst < 0.01);
}

TEST_CASE("transform check") {
    GridSpec grid = small_grid(0.1, 3, 4);
    grid.snapshot_every = 5;
    const ModelParams params(3, 2, 0, 1.8, 0.5, 1, 1);
    const auto coarse = transform_check(params, grid);
    const auto fine = transform_check(params, grid.refined());
    CHECK(coarse.max_initial_abs == 0.0);
    CHECK(coarse.compared_snapshots > 1);
    CHECK(fine.compared_snapshots == coarse.compared_snapshots);
    CHECK(fine.max_rel_discrepancy < coarse.max_rel_discrepancy / 3);
}

TEST_CASE("numerical solution dominates the seed lower bound") {
    const ModelParams params(3, 2, 0, 1.8, 0.5, 1, 1);
    const BoundConfig cfg(params);
    GridSpec grid = small_grid(0.05, 4, 20);
    grid.snapshot_every = 10;
    const auto r = run(Form::UForm, params, grid);
    REQUIRE_FALSE(r.blew_up());
    const double logC0 = seed_constant(cfg);
    int checked = 0;
    for (const auto& snap : r.snapshots) {
        const double t = snap.t;
        if (t <= 0) continue;
        for (std::size_t i = 1; i < snap.u.size(); ++i) {
            const double rad = i * grid.dr;
            if (!in_sigma(t, rad, cfg)) continue;
            const double seed = std::exp(logC0 + 2 * std::log(t) - std::log(rad) - 1.5 * std::log(rad + t));
            CHECK(snap.u[i] >= 0.9 * seed);
            ++checked;
        }
    }
    CHECK(checked > 100);
}
