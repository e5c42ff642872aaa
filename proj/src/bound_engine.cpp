#include "blowup/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blowup/error.hpp"
#include "blowup/parallel.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

namespace {

// Growth coefficient of a_k: a_k = A p^(k-1) + B.
double growth_a(const ModelParams& q) { return q.m() + 1.0 - 0.5 * q.mu + 2.0 / (q.p - 1.0); }

double log_minimand(int k, double p, double a_k) {
    return 2.0 * k * std::log(p) - (p + 1.0) * std::log(2.0) - 2.0 * std::log(p * a_k + 2.0);
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

double series_S(double p, double logK) {
    const double L = 2.0 * std::log(p);
    const double x = 1.0 / p;
    CompensatedSum s;
    double xj = 1.0;
    constexpr long kMaxTerms = 50'000'000;
    for (long j = 1; j <= kMaxTerms; ++j) {
        xj *= x;
        s.add((j * L - logK) * xj);
        // sum_{i>j} (i L + |log K|) x^i
        const double xj1 = xj * x;
        const double tail =
            L * xj1 * ((j + 1.0) - j * x) / ((1.0 - x) * (1.0 - x)) + std::abs(logK) * xj1 / (1.0 - x);
        if (tail <= 1e-16 * std::abs(s.value())) return s.value();
    }
    throw DomainError("series S_{p,K} did not converge; p too close to 1");
}

}  // namespace

BoundConfig::BoundConfig(ModelParams params_, double delta_, double delta_m_)
    : delta(delta_), delta_m(delta_m_), params(params_) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be > 0");
    if (!(delta_m > 0.0) || !std::isfinite(delta_m)) throw DomainError("delta_m must be > 0");
}

bool in_sigma(double t, double r, const BoundConfig& cfg) {
    if (!(t > 0.0) || !(r > 0.0)) return false;
    return r - t >= std::max(2.0 * t / cfg.delta_m, cfg.delta);
}

double seed_constant(const BoundConfig& cfg) {
    const auto& q = cfg.params;
    const int m = q.m();
    return std::log(q.eps) + (m - 2) * std::log(2.0) + std::log(q.M) - m * std::log(cfg.delta_m) +
           (q.kbar + 1.0) * std::log(cfg.delta / (1.0 + cfg.delta));
}

IterationState seed_state(const BoundConfig& cfg) {
    return {1, cfg.params.m() + 1.0, cfg.params.kbar + 1.0, seed_constant(cfg)};
}

IterationState iterate(const IterationState& s, const BoundConfig& cfg) {
    if (s.k < 1) throw DomainError("iteration index must be >= 1");
    const auto& q = cfg.params;
    const double p = q.p;
    const double half_mu = 0.5 * q.mu;
    IterationState next;
    next.k = s.k + 1;
    next.a = p * (s.a - half_mu) + 2.0 + half_mu;
    next.b = p * s.b + q.m() * (p - 1.0);
    next.logC = p * s.logC - p * std::log(2.0) - std::log(2.0) - 2.0 * std::log(p * s.a + 2.0);
    return next;
}

std::pair<double, double> closed_form(int k, const BoundConfig& cfg) {
    if (k < 1) throw DomainError("closed_form requires k >= 1");
    const auto& q = cfg.params;
    const double p = q.p;
    const double pk = std::pow(p, k - 1);
    const double a = pk * growth_a(q) + 0.5 * q.mu - 2.0 / (p - 1.0);
    const double b = pk * (q.kbar + 1.0 + q.m()) - q.m();
    return {a, b};
}

IterationConstants derive_K(const BoundConfig& cfg, int k_max) {
    if (k_max < 10) throw DomainError("derive_K requires k_max >= 10");
    const auto& q = cfg.params;
    const double p = q.p;
    const double A = growth_a(q);
    if (!(A > 0.0)) {
        throw PreconditionError("m+1-mu/2+2/(p-1)>0", "iteration exponents a_k do not grow: m+1-mu/2+2/(p-1) <= 0");
    }

    IterationConstants c;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> values(static_cast<std::size_t>(k_max) + 1);
    for (int k = 1; k <= k_max; ++k) {
        const double v = log_minimand(k, p, closed_form(k, cfg).first);
        values[static_cast<std::size_t>(k)] = v;
        if (v < best) {
            best = v;
            c.k_star = k;
        }
    }

    // The minimand is (p^k / (A p^k + c))^2 / 2^(p+1): monotone in k, limit 1/(2^(p+1) A^2).
    const int half = k_max / 2;
    const double tol = 1e-13 * (1.0 + std::abs(values[static_cast<std::size_t>(half)]));
    bool nondecreasing = true;
    bool nonincreasing = true;
    for (int k = half; k < k_max; ++k) {
        const double d = values[static_cast<std::size_t>(k) + 1] - values[static_cast<std::size_t>(k)];
        if (d < -tol) nondecreasing = false;
        if (d > tol) nonincreasing = false;
    }
    if (!nondecreasing && !nonincreasing) {
        throw DomainError("K minimand not monotone on [k_max/2, k_max]; increase k_max");
    }
    const double limit = -(p + 1.0) * std::log(2.0) - 2.0 * std::log(A);
    if (limit < best) {
        best = limit;
        c.k_star = 0;
        c.attained_in_limit = true;
    }

    c.logK = best;
    c.K = std::exp(best);
    c.S_limit = series_S(p, c.logK);
    c.logC0 = seed_constant(cfg);
    return c;
}

double J(double t, double r, const IterationConstants& consts, const BoundConfig& cfg) {
    if (!(t > 1.0)) throw DomainError("J requires t > 1");
    if (!(r > 0.0)) throw DomainError("J requires r > 0");
    const auto& q = cfg.params;
    return consts.logC0 - consts.S_limit + growth_a(q) * std::log(t) - (q.kbar + 1.0 + q.m()) * std::log(r + t);
}

std::vector<std::string> failed_bound_hypotheses(const ModelParams& q) {
    std::vector<std::string> failed;
    if (!(q.kbar < 2.0 / (q.p - 1.0) - 0.5 * q.mu)) failed.emplace_back("kbar<2/(p-1)-mu/2");
    if (q.mu > 2.0 && !(q.p < fujita(0.5 * q.mu - 1.0))) failed.emplace_back("p<p_F(mu/2-1)");
    if (!(q.nu <= q.critical_mass())) failed.emplace_back("nu<=(mu/2)(mu/2-1)");
    return failed;
}

LifespanBound lifespan_upper_bound(const BoundConfig& cfg, int k_max) {
    const auto& q = cfg.params;
    const auto failed = failed_bound_hypotheses(q);
    if (!failed.empty()) {
        throw PreconditionError(failed.front(), "lifespan bound hypothesis fails: " + failed.front());
    }
    const int m = q.m();
    LifespanBound out;
    out.constants = derive_K(cfg, k_max);
    out.exponent = iteration_exponent(q.mu, q.kbar, q.p);
    const double inner = out.constants.S_limit + m * std::log(cfg.delta_m) - (m - 2) * std::log(2.0) -
                         std::log(q.M) + (q.kbar + 1.0) * std::log((1.0 + cfg.delta) / cfg.delta) +
                         (1.0 + q.kbar + m) * std::log(2.0 + 2.0 / cfg.delta_m);
    out.logC = out.exponent * inner;
    out.C = std::exp(out.logC);
    out.log_T_upper = out.logC - out.exponent * std::log(q.eps);
    out.T_upper = std::exp(out.log_T_upper);
    return out;
}

double free_lower_bound(double t, double r, const BoundConfig& cfg) {
    if (!in_sigma(t, r, cfg)) throw DomainError("free_lower_bound requires (t, r) in the blow-up set");
    const auto& q = cfg.params;
    const int m = q.m();
    const double decay = -(q.kbar + 1.0);
    auto integrand = [&](double lambda) { return std::pow(lambda, m) * q.M * std::pow(1.0 + lambda, decay); };
    return q.eps / (8.0 * std::pow(r, m)) * integrate(integrand, r - t, r + t, 1e-10);
}

StepReport verify_iteration_step(const IterationState& state, const std::vector<std::pair<double, double>>& samples,
                                 const BoundConfig& cfg, double slack, unsigned jobs) {
    const auto& q = cfg.params;
    const int m = q.m();
    const double p = q.p;
    const double a = state.a;
    const double b = state.b;
    const double time_decay = 0.5 * q.mu * (p - 1.0);
    const double a_star = p * (a - 0.5 * q.mu) + 2.0 + 0.5 * q.mu;
    const double b_star = p * b + m * (p - 1.0);
    // log C* with C normalized to 1; the C^p factor is common to both sides.
    const double log_c_star = -p * std::log(2.0) - std::log(2.0) - 2.0 * std::log(p * a + 2.0);

    for (const auto& [t, r] : samples) {
        if (!(t > 1.0) || !in_sigma(t, r, cfg)) {
            throw DomainError("verify_iteration_step samples must lie in the blow-up set with t > 1");
        }
    }

    StepReport report;
    report.samples.resize(samples.size());
    parallel_for(samples.size(), jobs, [&](std::size_t i) {
        const auto [t, r] = samples[i];
        const double rt = r + t;
        // Integrand scaled by t^(pa) (r+t)^(b*) so that it stays O(1) for any (a, b).
        auto inner = [&](double tau) {
            if (tau >= t) return 0.0;
            auto lam_f = [&](double lambda) {
                return std::pow(lambda / rt, m * (1.0 - p)) * std::pow((lambda + tau) / rt, -p * b);
            };
            const double lam = integrate(lam_f, r - t + tau, r + t - tau, 1e-11);
            return std::pow(1.0 + tau, -time_decay) * std::pow(tau / t, p * a) * lam;
        };
        const double scaled = integrate(inner, 0.0, t, 1e-9);

        StepSample s;
        s.t = t;
        s.r = r;
        s.log_lhs = std::log(scaled / 8.0) + p * a * std::log(t) - b_star * std::log(rt) - m * std::log(r) +
                    p * state.logC;
        s.log_rhs = (log_c_star + p * state.logC) + a_star * std::log(t) - m * std::log(r) - b_star * std::log(rt);
        s.ratio = std::exp(s.log_lhs - s.log_rhs);
        report.samples[i] = s;
    });

    report.worst_ratio = std::numeric_limits<double>::infinity();
    for (const auto& s : report.samples) report.worst_ratio = std::min(report.worst_ratio, s.ratio);
    report.pass = report.worst_ratio >= 1.0 - slack;
    return report;
}

}  // namespace blowup
