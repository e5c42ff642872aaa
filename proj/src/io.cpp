#include "blowup/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace blowup {

using nlohmann::ordered_json;

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// null for non-finite values, which JSON cannot carry.
ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

ordered_json to_json(const ModelParams& q) {
    return {{"n", q.n}, {"mu", q.mu}, {"nu", q.nu}, {"p", q.p}, {"kbar", q.kbar}, {"M", q.M}, {"eps", q.eps}};
}

ordered_json to_json(const GridSpec& g) {
    return {{"dr", g.dr},
            {"cfl", g.cfl},
            {"dt", g.dt()},
            {"r_max", g.effective_r_max()},
            {"t_max", g.t_max},
            {"u_threshold", g.u_threshold},
            {"r_obs", g.r_obs}};
}

ordered_json to_json(const RegionVerdict& v) {
    ordered_json j;
    j["verdict"] = to_string(v.kind);
    j["alpha"] = v.lifespan_exponent ? num(*v.lifespan_exponent) : ordered_json(nullptr);
    j["active_constraints"] = v.active_constraints;
    return j;
}

ordered_json bound_json(const BoundConfig& cfg, const LifespanBound& b) {
    ordered_json j;
    j["C0"] = num(std::exp(b.constants.logC0));
    j["K"] = num(b.constants.K);
    j["S_limit"] = num(b.constants.S_limit);
    j["C"] = num(b.C);
    j["exponent"] = num(b.exponent);
    j["T_upper"] = num(b.T_upper);
    j["delta_m"] = cfg.delta_m;
    j["conditional"] = true;
    j["delta"] = cfg.delta;
    j["log_C"] = num(b.logC);
    j["log_T_upper"] = num(b.log_T_upper);
    j["k_star"] = b.constants.k_star;
    j["params"] = to_json(cfg.params);
    return j;
}

ordered_json run_summary_json(const SolverRun& r) {
    ordered_json j;
    j["form"] = to_string(r.form);
    j["params"] = to_json(r.params);
    j["grid"] = to_json(r.grid);
    j["outcome"] = r.blew_up() ? "BlewUp" : "Survived";
    j["T_num"] = r.blew_up() ? num(r.T_num) : ordered_json(nullptr);
    j["t_end"] = num(r.blew_up() ? r.T_num : r.grid.t_max);
    j["steps"] = r.steps;
    j["max_amplitude"] = num(r.max_amplitude);
    if (!r.max_amplitude_history.empty()) {
        ordered_json h = ordered_json::array();
        for (const auto& [t, a] : r.max_amplitude_history) h.push_back({num(t), num(a)});
        j["max_amplitude_history"] = std::move(h);
    }
    return j;
}

ordered_json to_json(const TransformReport& rep) {
    return {{"max_rel_discrepancy", num(rep.max_rel_discrepancy)},
            {"max_initial_abs", num(rep.max_initial_abs)},
            {"compared_snapshots", rep.compared_snapshots}};
}

ordered_json sweep_summary_json(const SweepResult& r) {
    ordered_json j;
    j["slope"] = num(r.slope);
    j["intercept"] = num(r.intercept);
    j["r_squared"] = num(r.r_squared);
    j["alpha_theory"] = num(r.alpha_theory);
    j["pass"] = r.pass();
    j["complete"] = r.complete;
    j["survived_eps"] = r.survived_eps;
    if (!r.message.empty()) j["message"] = r.message;
    double worst = 0.0;
    for (const auto& p : r.points) worst = std::max(worst, p.refinement_agreement);
    j["max_refinement_disagreement"] = num(worst);
    return j;
}

ordered_json to_json(const UpperBoundReport& rep) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : rep.rows) {
        rows.push_back({{"eps", row.eps}, {"T_num", num(row.T_num)}, {"T_upper", num(row.T_upper)},
                        {"status", to_string(row.status)}});
    }
    return {{"C", num(rep.C)},
            {"exponent", num(rep.exponent)},
            {"delta", rep.delta},
            {"delta_m", rep.delta_m},
            {"conditional", rep.conditional_on_delta_m},
            {"all_pass", rep.all_pass},
            {"rows", std::move(rows)}};
}

ordered_json to_json(const ConvergenceReport& rep) {
    ordered_json j;
    j["dr"] = rep.dr;
    j["comparison_time"] = rep.comparison_time;
    j["exact_reference"] = rep.exact_reference;
    j["profile_errors"] = rep.profile_errors;
    j["profile_orders"] = rep.profile_orders;
    if (!rep.T_num.empty()) {
        j["T_num"] = rep.T_num;
        j["T_orders"] = rep.T_orders;
        j["T_agreement_finest"] = rep.T_agreement_finest ? num(*rep.T_agreement_finest) : ordered_json(nullptr);
    }
    j["pass"] = rep.pass;
    return j;
}

void write_atlas_csv(std::ostream& os, const Atlas& a) {
    os << "kbar,p,verdict,alpha_or_blank\n";
    for (std::size_t ip = 0; ip < a.p_nodes.size(); ++ip) {
        for (std::size_t ik = 0; ik < a.kbar_nodes.size(); ++ik) {
            const auto& v = a.at(ik, ip);
            os << format_number(a.kbar_nodes[ik]) << ',' << format_number(a.p_nodes[ip]) << ',' << to_string(v.kind)
               << ',';
            if (v.lifespan_exponent) os << format_number(*v.lifespan_exponent);
            os << '\n';
        }
    }
}

void write_atlas_curves_csv(std::ostream& os, const Atlas& a) {
    os << "curve,kbar,p\n";
    for (const auto& pt : a.fujita_curve) {
        os << "fujita," << format_number(pt.kbar) << ',' << format_number(pt.p) << '\n';
    }
    if (!a.kbar_nodes.empty() && a.strauss_line > 0.0) {
        os << "strauss," << format_number(a.kbar_nodes.front()) << ',' << format_number(a.strauss_line) << '\n';
        os << "strauss," << format_number(a.kbar_nodes.back()) << ',' << format_number(a.strauss_line) << '\n';
        os << "strauss_couple," << format_number(a.strauss_couple.kbar) << ',' << format_number(a.strauss_couple.p)
           << '\n';
    }
}

void write_atlas_svg(std::ostream& os, const Atlas& a) {
    constexpr double W = 720.0;
    constexpr double H = 540.0;
    constexpr double left = 80.0;
    constexpr double right = 30.0;
    constexpr double top = 40.0;
    constexpr double bottom = 60.0;
    const double kmin = a.kbar_nodes.front();
    const double kmax = a.kbar_nodes.back();
    const double pmin = a.p_nodes.front();
    const double pmax = a.p_nodes.back();
    const double kspan = kmax > kmin ? kmax - kmin : 1.0;
    const double pspan = pmax > pmin ? pmax - pmin : 1.0;
    auto X = [&](double k) { return left + (k - kmin) / kspan * (W - left - right); };
    auto Y = [&](double p) { return H - bottom - (p - pmin) / pspan * (H - top - bottom); };

    const double cw = (W - left - right) / static_cast<double>(a.kbar_nodes.size());
    const double ch = (H - top - bottom) / static_cast<double>(a.p_nodes.size());

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<title>Region atlas n=" << a.n << " mu=" << format_number(a.mu) << " nu=" << format_number(a.nu)
       << "</title>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    os << "<g id=\"regions\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t ip = 0; ip < a.p_nodes.size(); ++ip) {
        for (std::size_t ik = 0; ik < a.kbar_nodes.size(); ++ik) {
            const auto kind = a.at(ik, ip).kind;
            if (kind == RegionKind::Unknown) continue;
            const char* fill = kind == RegionKind::BlowUpTheorem1 ? "#e06666" : "#6fa8dc";
            const double x = left + static_cast<double>(ik) * cw;
            const double y = H - bottom - static_cast<double>(ip + 1) * ch;
            os << "<rect x=\"" << fixed(x, 3) << "\" y=\"" << fixed(y, 3) << "\" width=\"" << fixed(cw, 3)
               << "\" height=\"" << fixed(ch, 3) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    os << "</g>\n";

    // Axes.
    os << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1.5\">\n";
    os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
       << "\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << left << "\" y2=\"" << top << "\"/>\n";
    os << "</g>\n";
    os << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 40 << "\" text-anchor=\"end\" font-size=\"18\">k&#772;</text>\n";
    os << "<text x=\"" << left - 50 << "\" y=\"" << top << "\" font-size=\"18\">p</text>\n";
    auto tick = [&](double x, double y, const std::string& label, const char* anchor) {
        os << "<text x=\"" << fixed(x, 3) << "\" y=\"" << fixed(y, 3) << "\" font-size=\"11\" text-anchor=\"" << anchor
           << "\">" << label << "</text>\n";
    };
    tick(X(kmin), H - bottom + 16, fixed(kmin, 3), "middle");
    tick(X(kmax), H - bottom + 16, fixed(kmax, 3), "middle");
    tick(left - 6, Y(pmin) + 4, fixed(pmin, 3), "end");
    tick(left - 6, Y(pmax) + 4, fixed(pmax, 3), "end");

    // Fujita curve p = p_F(kbar + mu/2), clipped to the plot.
    os << "<polyline id=\"fujita-curve\" fill=\"none\" stroke=\"#1c4587\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& pt : a.fujita_curve) {
        if (pt.p < pmin || pt.p > pmax) continue;
        if (!first) os << ' ';
        os << fixed(X(pt.kbar), 3) << ',' << fixed(Y(pt.p), 3);
        first = false;
    }
    os << "\"/>\n";

    if (a.strauss_line >= pmin && a.strauss_line <= pmax) {
        os << "<line id=\"strauss-line\" x1=\"" << fixed(X(kmin), 3) << "\" y1=\"" << fixed(Y(a.strauss_line), 3)
           << "\" x2=\"" << fixed(X(kmax), 3) << "\" y2=\"" << fixed(Y(a.strauss_line), 3)
           << "\" stroke=\"#990000\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << fixed(Y(a.strauss_line) - 4, 3)
           << "\" font-size=\"11\" text-anchor=\"end\">p_S(n+&#956;)=" << fixed(a.strauss_line, 10) << "</text>\n";
    }
    const auto& sc = a.strauss_couple;
    if (sc.kbar >= kmin && sc.kbar <= kmax && sc.p >= pmin && sc.p <= pmax) {
        os << "<g id=\"strauss-couple\" data-kbar=\"" << format_number(sc.kbar) << "\" data-p=\""
           << format_number(sc.p) << "\">\n";
        os << "<line x1=\"" << fixed(X(sc.kbar), 3) << "\" y1=\"" << fixed(Y(sc.p), 3) << "\" x2=\""
           << fixed(X(sc.kbar), 3) << "\" y2=\"" << H - bottom << "\" stroke=\"black\" stroke-dasharray=\"2,3\"/>\n";
        os << "<circle cx=\"" << fixed(X(sc.kbar), 3) << "\" cy=\"" << fixed(Y(sc.p), 3)
           << "\" r=\"4\" fill=\"black\"/>\n";
        os << "<text x=\"" << fixed(X(sc.kbar), 3) << "\" y=\"" << H - bottom + 32
           << "\" font-size=\"11\" text-anchor=\"middle\">k&#772;&#8320;=" << fixed(sc.kbar, 10) << "</text>\n";
        os << "<text x=\"" << fixed(X(sc.kbar) + 8, 3) << "\" y=\"" << fixed(Y(sc.p) - 8, 3)
           << "\" font-size=\"11\">(" << fixed(sc.kbar, 10) << ", " << fixed(sc.p, 10) << ")</text>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
}

void write_snapshots_csv(std::ostream& os, const SolverRun& run) {
    os << "t,r,u\n";
    for (const auto& s : run.snapshots) {
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            os << format_number(s.t) << ',' << format_number(static_cast<double>(i) * run.grid.dr) << ','
               << format_number(s.u[i]) << '\n';
        }
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "eps,T_num,refinement_agreement\n";
    for (const auto& p : result.points) {
        os << format_number(p.eps) << ',' << format_number(p.T_num) << ',' << format_number(p.refinement_agreement)
           << '\n';
    }
}

void write_bound_check_csv(std::ostream& os, const UpperBoundReport& rep) {
    os << "eps,T_num,T_upper,status\n";
    for (const auto& r : rep.rows) {
        os << format_number(r.eps) << ',' << format_number(r.T_num) << ',' << format_number(r.T_upper) << ','
           << to_string(r.status) << '\n';
    }
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace blowup
