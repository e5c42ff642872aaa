#include "blowup/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "blowup/error.hpp"

namespace blowup {

namespace {

std::string fmt_param(const char* name, double value) {
    std::ostringstream os;
    os.precision(17);
    os << name << " = " << value;
    return os.str();
}

// nu equal to (mu/2)(mu/2-1) up to rounding of the product.
bool nu_is_critical(double nu, double mu) {
    const double crit = 0.5 * mu * (0.5 * mu - 1.0);
    return std::abs(nu - crit) <= 1e-12 * std::max(1.0, std::abs(crit));
}

bool is_odd(int n) { return n % 2 != 0; }

}  // namespace

ModelParams::ModelParams(int n_, double mu_, double nu_, double p_, double kbar_, double M_, double eps_)
    : n(n_), mu(mu_), nu(nu_), p(p_), kbar(kbar_), M(M_), eps(eps_) {
    if (n < 2) throw DomainError("n must be >= 2, got " + std::to_string(n));
    if (!std::isfinite(mu)) throw DomainError("mu must be finite");
    if (!std::isfinite(nu)) throw DomainError("nu must be finite");
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError(fmt_param("p must be > 1, got p", p));
    if (!(kbar > -1.0) || !std::isfinite(kbar)) throw DomainError(fmt_param("kbar must be > -1, got kbar", kbar));
    if (!(M > 0.0) || !std::isfinite(M)) throw DomainError(fmt_param("M must be > 0, got M", M));
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError(fmt_param("eps must be > 0, got eps", eps));
}

ModelParams ModelParams::with_eps(double new_eps) const {
    return ModelParams(n, mu, nu, p, kbar, M, new_eps);
}

ModelParams ModelParams::with_amplitude(double new_M) const {
    return ModelParams(n, mu, nu, p, kbar, new_M, eps);
}

double fujita(double h) {
    if (!(h > 0.0)) throw DomainError(fmt_param("fujita requires h > 0, got h", h));
    return 1.0 + 2.0 / h;
}

double strauss(double d) {
    if (!(d > 1.0)) throw DomainError(fmt_param("strauss requires d > 1, got d", d));
    const double b = d + 1.0;
    return (b + std::sqrt(b * b + 8.0 * (d - 1.0))) / (2.0 * (d - 1.0));
}

double kbar_zero(int n, double mu) {
    if (n < 2) throw DomainError("kbar_zero requires n >= 2");
    if (!(n + mu > 1.0)) throw DomainError(fmt_param("kbar_zero requires n + mu > 1, got mu", mu));
    return 2.0 / (strauss(n + mu) - 1.0) - 0.5 * mu;
}

double mu_max(int n) {
    if (n < 2) throw DomainError("mu_max requires n >= 2");
    const double nm1 = n - 1.0;
    return 0.5 * nm1 * (1.0 + std::sqrt((n + 7.0) / nm1));
}

double p_bar(int n, double mu) {
    if (!(mu > 0.0)) throw DomainError(fmt_param("p_bar requires mu > 0, got mu", mu));
    return std::min(fujita(mu), fujita(0.5 * (n + mu - 1.0)));
}

AdmissibleRange admissible_range(int n, double p, double mu) {
    if (!(p > 1.0)) throw DomainError(fmt_param("admissible_range requires p > 1, got p", p));
    if (n < 2) throw DomainError("admissible_range requires n >= 2");

    const double q = p - 1.0;
    AdmissibleRange r;

    if (mu == 2.0) {
        if (n == 3) {
            r.case_name = "n=3, mu=2";
            r.k1 = std::max((3.0 - p) / q, 1.0 / q);
            r.k2 = 2.0 * q;
            return r;
        }
        if (is_odd(n) && n >= 5) {
            r.case_name = "odd n>=5, mu=2";
            const double cap_k = (n * n - 2.0 * n + 13.0) / (2.0 * (n - 3.0));
            r.k1 = std::max((3.0 - p) / q, 0.5 * (n - 1.0));
            r.k2 = std::min(0.5 * (n + 1.0) * p - 2.0, cap_k);
            r.p_cap_inclusive = true;
            if (n == 5) {
                r.p_cap = 2.0;
                r.kbar_cap = 3.0;
            } else {
                r.p_cap = (n + 1.0) / (n - 3.0);
                r.kbar_cap = cap_k;
            }
            return r;
        }
        if (!is_odd(n) && n >= 4) {
            r.case_name = "even n>=4, mu=2";
            r.k1 = std::max((3.0 - p) / q, 0.5 * (n - 1.0));
            r.k2 = std::min(0.5 * (n + 1.0) * p - 2.0, n - 1.0);
            r.p_cap = p_bar(n, mu);
            return r;
        }
        throw UncoveredCase("no documented admissible range for n=" + std::to_string(n) + ", mu=2");
    }

    const double M = mu_max(n);
    if (!(mu >= 2.0 && mu <= M)) {
        throw UncoveredCase(fmt_param("no documented admissible range outside mu in [2, M(n)]; mu", mu));
    }
    const double k2 = std::min(n - 1.0, 0.5 * (n + mu - 1.0) * p - 0.5 * (mu + 2.0));
    const double fujita_k = 2.0 / q - 0.5 * mu;

    if (!is_odd(n) && n >= 4) {
        r.case_name = "even n>=4, general mu";
        r.k1 = std::max(0.5 * (n - 1.0), fujita_k);
        r.k1_inclusive = false;
        r.k2 = k2;
        r.p_cap = p_bar(n, mu);
        return r;
    }
    if (n == 3) {
        r.case_name = "n=3, general mu";
        r.k1 = std::max({1.0, fujita_k, 1.0 / q});
        r.k2 = k2;
        r.p_cap = p_bar(n, mu);
        return r;
    }
    if (is_odd(n) && n >= 5) {
        if (mu <= n - 1.0) {
            r.case_name = "odd n>=5, mu in [2,n-1]";
            r.k1 = std::max(0.5 * (n - 1.0), fujita_k);
        } else {
            r.case_name = "odd n>=5, mu in (n-1,M(n)]";
            r.k1 = std::max({0.5 * (n - 1.0), fujita_k, 1.0 / q});
        }
        r.k2 = k2;
        r.p_cap = p_bar(n, mu);
        return r;
    }
    throw UncoveredCase("no documented admissible range for n=" + std::to_string(n) +
                        fmt_param(", mu", mu));
}

// Both exponents divide by a quantity that vanishes on the Fujita curve, so they
// are evaluated in quad precision and rounded once.
using Quad = boost::multiprecision::cpp_bin_float_quad;

double lifespan_exponent_formula(double mu, double kbar, double p) {
    const Quad q = Quad(p) - 1;
    return static_cast<double>(2 * q / (4 - (Quad(mu) + 2 * Quad(kbar)) * q));
}

double iteration_exponent(double mu, double kbar, double p) {
    const Quad q = Quad(p) - 1;
    return static_cast<double>(1 / (2 / q - Quad(mu) / 2 - Quad(kbar)));
}

std::vector<std::string> failed_blowup_hypotheses(const ModelParams& params) {
    std::vector<std::string> failed;
    const double h = params.kbar + 0.5 * params.mu;
    if (!(h > 0.0)) failed.emplace_back("kbar+mu/2>0");
    if (!(params.critical_mass() >= params.nu)) failed.emplace_back("nu<=(mu/2)(mu/2-1)");
    if (h > 0.0 && !(params.p < fujita(h))) failed.emplace_back("p<p_F(kbar+mu/2)");
    return failed;
}

double lifespan_exponent(const ModelParams& params) {
    const auto failed = failed_blowup_hypotheses(params);
    if (!failed.empty()) {
        throw PreconditionError(failed.front(), "blow-up hypothesis fails: " + failed.front());
    }
    return lifespan_exponent_formula(params.mu, params.kbar, params.p);
}

std::string to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::BlowUpTheorem1: return "BlowUpTheorem1";
        case RegionKind::GlobalExistenceLiterature: return "GlobalExistenceLiterature";
        case RegionKind::Unknown: return "Unknown";
    }
    return "Unknown";
}

RegionVerdict classify(const ModelParams& params) {
    RegionVerdict v;
    const auto failed = failed_blowup_hypotheses(params);
    if (failed.empty()) {
        v.kind = RegionKind::BlowUpTheorem1;
        v.lifespan_exponent = lifespan_exponent_formula(params.mu, params.kbar, params.p);
        v.active_constraints = {"kbar+mu/2>0", "nu<=(mu/2)(mu/2-1)", "p<p_F(kbar+mu/2)"};
        return v;
    }

    // Global existence is only known on the critical-mass line with mu in [2, M(n)].
    const int n = params.n;
    const double mu = params.mu;
    const double p = params.p;
    auto unknown = [&](std::string why) {
        v.kind = RegionKind::Unknown;
        v.active_constraints = failed;
        v.active_constraints.push_back(std::move(why));
        return v;
    };

    if (!nu_is_critical(params.nu, mu) || params.critical_mass() < 0.0) {
        return unknown("nu!=(mu/2)(mu/2-1)>=0");
    }
    if (!(mu >= 2.0 && mu <= mu_max(n))) return unknown("mu outside [2,M(n)]");

    const double pS = strauss(n + mu);
    const double pF = fujita(params.kbar + 0.5 * mu);
    if (!(p > pS)) return unknown("p<=p_S(n+mu)");
    if (!(p > pF)) return unknown("p<=p_F(kbar+mu/2)");

    AdmissibleRange range;
    try {
        range = admissible_range(n, p, mu);
    } catch (const UncoveredCase&) {
        return unknown("uncovered literature case");
    }

    std::vector<std::string> active = {"nu=(mu/2)(mu/2-1)>=0", "mu in [2,M(n)]", "p>p_S(n+mu)",
                                       "p>p_F(kbar+mu/2)"};
    if (range.p_cap) {
        const bool ok = range.p_cap_inclusive ? p <= *range.p_cap : p < *range.p_cap;
        if (!ok) return unknown("p above cap of case " + range.case_name);
        active.emplace_back("p below cap of case " + range.case_name);
    }

    // Faster-decaying data also satisfies the weaker decay assumption at the upper end.
    double k_eff = params.kbar;
    double k_upper = range.k2;
    if (range.kbar_cap) k_upper = std::min(k_upper, *range.kbar_cap);
    if (k_eff > k_upper) {
        k_eff = k_upper;
        active.emplace_back("kbar>k2 reduced to k2");
    }
    const bool above_k1 = range.k1_inclusive ? k_eff >= range.k1 : k_eff > range.k1;
    if (!above_k1) return unknown("kbar below k1 of case " + range.case_name);
    active.emplace_back("kbar>=k1");

    v.kind = RegionKind::GlobalExistenceLiterature;
    v.active_constraints = std::move(active);
    return v;
}

std::vector<double> RangeSpec::nodes() const {
    if (count < 1) throw ConfigError("count", "range must have at least one node");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw ConfigError("range", "range bounds must be finite with lo <= hi");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    out.back() = hi;
    return out;
}

Atlas atlas(int n, double mu, double nu, const RangeSpec& k_grid, const RangeSpec& p_grid, int curve_samples) {
    if (k_grid.count < 1 || p_grid.count < 1) throw ConfigError("grid", "atlas grid is empty");
    if (curve_samples < 2) throw ConfigError("curve_samples", "need at least two curve samples");

    Atlas a;
    a.n = n;
    a.mu = mu;
    a.nu = nu;
    a.kbar_nodes = k_grid.nodes();
    a.p_nodes = p_grid.nodes();
    a.verdicts.reserve(a.kbar_nodes.size() * a.p_nodes.size());
    for (double p : a.p_nodes) {
        for (double k : a.kbar_nodes) {
            a.verdicts.push_back(classify(ModelParams(n, mu, nu, p, k)));
        }
    }

    if (n + mu > 1.0) {
        a.strauss_line = strauss(n + mu);
        a.strauss_couple = {kbar_zero(n, mu), a.strauss_line};
    }

    const double step = (k_grid.hi - k_grid.lo) / (curve_samples - 1);
    for (int i = 0; i < curve_samples; ++i) {
        const double k = k_grid.lo + step * i;
        const double h = k + 0.5 * mu;
        if (h > 0.0) a.fujita_curve.push_back({k, fujita(h)});
    }
    return a;
}

}  // namespace blowup
