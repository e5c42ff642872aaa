#include "blowup/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "blowup/bound_engine.hpp"
#include "blowup/error.hpp"
#include "blowup/experiments.hpp"
#include "blowup/exponents.hpp"
#include "blowup/io.hpp"
#include "blowup/solver.hpp"

namespace blowup::cli {

namespace {

using nlohmann::ordered_json;

const std::vector<KeySpec> kRegistry = {
    {"model.n", "--n", "-", "", "spatial dimension"},
    {"model.mu", "--mu", "-", "", "scale-invariant damping coefficient"},
    {"model.nu", "--nu", "-", "0", "scale-invariant mass coefficient"},
    {"model.p", "--p", "-", "", "power of the nonlinearity"},
    {"model.kbar", "--kbar", "-", "", "decay rate of the initial velocity"},
    {"model.M", "--M", "-", "1", "amplitude of the initial velocity"},
    {"model.eps", "--eps", "-", "1", "size of the initial data"},
    {"bound.delta", "--delta", "-", "1", "width of the blow-up set behind the light cone"},
    {"bound.delta_m", "--delta-m", "-", "1", "constant of the free-solution lower bound"},
    {"bound.k_max", "--k-max", "-", "60", "iterations inspected when constructing K"},
    {"grid.dr", "--dr", "length", "0.05", "radial step"},
    {"grid.cfl", "--cfl", "-", "0.9", "dt / dr"},
    {"grid.r_max", "--r-max", "length", "0", "outer radius, 0 = domain of dependence of r_obs"},
    {"grid.t_max", "--t-max", "time", "10", "final time"},
    {"grid.u_threshold", "--u-threshold", "-", "1e8", "amplitude that counts as blow-up"},
    {"grid.r_obs", "--r-obs", "length", "10", "radius of the monitored region"},
    {"grid.snapshot_every", "--snapshot-every", "steps", "0", "snapshot stride, 0 = none"},
    {"simulate.form", "--form", "-", "u", "unknown to integrate: u or v"},
    {"simulate.check_transform", "--check-transform", "-", "false", "also compare u against (1+t)^(mu/2) v", true},
    {"sweep.eps", "--eps-list", "-", "", "comma separated eps values, overrides the geometric grid"},
    {"sweep.eps_min", "--eps-min", "-", "2", "smallest eps of the geometric grid"},
    {"sweep.eps_max", "--eps-max", "-", "10", "largest eps of the geometric grid"},
    {"sweep.eps_count", "--eps-count", "-", "5", "number of eps values"},
    {"sweep.refinement_levels", "--refinement-levels", "-", "1", "grid halvings on top of the base grid"},
    {"sweep.check_bound", "--check-bound", "-", "false", "compare every T_num with the lifespan upper bound", true},
    {"atlas.kbar_min", "--kbar-min", "-", "0", "left edge of the kbar axis"},
    {"atlas.kbar_max", "--kbar-max", "-", "4", "right edge of the kbar axis"},
    {"atlas.kbar_count", "--kbar-count", "nodes", "100", "kbar nodes"},
    {"atlas.p_min", "--p-min", "-", "1.05", "bottom edge of the p axis"},
    {"atlas.p_max", "--p-max", "-", "4", "top edge of the p axis"},
    {"atlas.p_count", "--p-count", "nodes", "100", "p nodes"},
    {"atlas.curve_samples", "--curve-samples", "points", "512", "samples per boundary curve"},
    {"converge.levels", "--levels", "-", "3", "number of grids, each half the previous dr"},
    {"converge.time", "--time", "time", "1", "comparison time"},
    {"converge.free_wave", "--free-wave", "-", "false",
     "linear n=3 run from a compact bump, compared with the exact solution", true},
    {"converge.bump_radius", "--bump-radius", "length", "2", "support radius of the free-wave datum"},
    {"converge.track_blowup", "--track-blowup", "-", "false", "also compare blow-up times across levels", true},
    {"run.jobs", "--jobs", "workers", "0", "worker threads, 0 = available parallelism (env BLOWUPLAB_JOBS)"},
    {"run.out", "--out", "path", "out", "output directory"},
};

const KeySpec& spec_of(const std::string& key) {
    for (const auto& k : kRegistry) {
        if (k.key == key) return k;
    }
    throw std::logic_error("unregistered key " + key);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Keys per subcommand; a config file may carry keys of other subcommands.
const std::map<std::string, std::vector<std::string>>& subcommand_keys() {
    static const std::vector<std::string> model = {"model.n",    "model.mu", "model.nu", "model.p",
                                                   "model.kbar", "model.M",  "model.eps"};
    static const std::vector<std::string> bound = {"bound.delta", "bound.delta_m", "bound.k_max"};
    static const std::vector<std::string> grid = {"grid.dr",          "grid.cfl",   "grid.r_max",
                                                  "grid.t_max",       "grid.u_threshold", "grid.r_obs",
                                                  "grid.snapshot_every"};
    auto join = [](std::initializer_list<std::vector<std::string>> parts) {
        std::vector<std::string> out;
        for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
        return out;
    };
    static const std::map<std::string, std::vector<std::string>> table = {
        {"classify", model},
        {"bound", join({model, bound})},
        {"simulate", join({model, grid, {"simulate.form", "simulate.check_transform", "run.out"}})},
        {"sweep", join({model, grid, bound,
                        {"simulate.form", "sweep.eps", "sweep.eps_min", "sweep.eps_max", "sweep.eps_count",
                         "sweep.refinement_levels", "sweep.check_bound", "run.jobs", "run.out"}})},
        {"atlas", {"model.n", "model.mu", "model.nu", "atlas.kbar_min", "atlas.kbar_max", "atlas.kbar_count",
                   "atlas.p_min", "atlas.p_max", "atlas.p_count", "atlas.curve_samples", "run.out"}},
        {"converge", join({model, grid,
                           {"simulate.form", "converge.levels", "converge.time", "converge.free_wave",
                            "converge.bump_radius", "converge.track_blowup", "run.jobs", "run.out"}})},
    };
    return table;
}

// Free-wave runs ignore the model keys that only matter for the nonlinear problem.
const std::set<std::string> kFreeWaveOptional = {"model.n", "model.mu", "model.p", "model.kbar"};

class Values {
public:
    explicit Values(std::map<std::string, std::string> v) : v_(std::move(v)) {}

    bool has(const std::string& key) const {
        const auto it = v_.find(key);
        return it != v_.end() && !it->second.empty();
    }

    const std::string& str(const std::string& key) const {
        const auto it = v_.find(key);
        if (it == v_.end() || it->second.empty()) {
            throw ConfigError(key, "missing required key " + key + " (" + spec_of(key).flag + ")");
        }
        return it->second;
    }

    double num(const std::string& key) const { return parse_double(key, str(key)); }

    int integer(const std::string& key) const {
        const std::string& s = str(key);
        std::size_t used = 0;
        long value = 0;
        try {
            value = std::stol(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || value < INT32_MIN || value > INT32_MAX) {
            throw ConfigError(key, key + " must be an integer, got '" + s + "'");
        }
        return static_cast<int>(value);
    }

    bool boolean(const std::string& key) const {
        const std::string& s = str(key);
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw ConfigError(key, key + " must be true or false, got '" + s + "'");
    }

    static double parse_double(const std::string& key, const std::string& s) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw ConfigError(key, key + " must be a number, got '" + s + "'");
        return value;
    }

private:
    std::map<std::string, std::string> v_;
};

ModelParams model_from(const Values& v) {
    return ModelParams(v.integer("model.n"), v.num("model.mu"), v.num("model.nu"), v.num("model.p"),
                       v.num("model.kbar"), v.num("model.M"), v.num("model.eps"));
}

GridSpec grid_from(const Values& v) {
    GridSpec g;
    g.dr = v.num("grid.dr");
    g.cfl = v.num("grid.cfl");
    g.r_max = v.num("grid.r_max");
    g.t_max = v.num("grid.t_max");
    g.u_threshold = v.num("grid.u_threshold");
    g.r_obs = v.num("grid.r_obs");
    g.snapshot_every = v.integer("grid.snapshot_every");
    g.validate();
    return g;
}

BoundConfig bound_from(const Values& v, const ModelParams& params) {
    return BoundConfig(params, v.num("bound.delta"), v.num("bound.delta_m"));
}

unsigned jobs_from(const Values& v) {
    const int jobs = v.integer("run.jobs");
    if (jobs < 0) throw ConfigError("run.jobs", "run.jobs must be >= 0");
    return static_cast<unsigned>(jobs);
}

std::vector<double> eps_list(const Values& v) {
    if (v.has("sweep.eps")) {
        std::vector<double> out;
        std::stringstream ss(v.str("sweep.eps"));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(Values::parse_double("sweep.eps", trim(item)));
        return out;
    }
    return geometric_grid(v.num("sweep.eps_min"), v.num("sweep.eps_max"), v.integer("sweep.eps_count"));
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

int cmd_classify(const Values& v, std::ostream& out) {
    const auto params = model_from(v);
    ordered_json j;
    j["params"] = to_json(params);
    j["verdict"] = to_json(classify(params));
    out << dump(j);
    return kOk;
}

int cmd_bound(const Values& v, std::ostream& out) {
    const auto cfg = bound_from(v, model_from(v));
    out << dump(bound_json(cfg, lifespan_upper_bound(cfg, v.integer("bound.k_max"))));
    return kOk;
}

int cmd_simulate(const Values& v, std::ostream& out) {
    const auto params = model_from(v);
    const auto grid = grid_from(v);
    const Form form = form_from_string(v.str("simulate.form"));
    const std::string dir = v.str("run.out");

    const auto result = run(form, params, grid);
    std::ostringstream csv;
    write_snapshots_csv(csv, result);
    write_file(dir, "snapshots.csv", csv.str());

    ordered_json j = run_summary_json(result);
    if (v.boolean("simulate.check_transform")) j["transform"] = to_json(transform_check(params, grid));
    write_file(dir, "run.json", dump(j));
    out << dump(j);
    return kOk;
}

int cmd_sweep(const Values& v, std::ostream& out) {
    SweepSpec spec{.params_base = model_from(v),
                   .eps_values = eps_list(v),
                   .grid = grid_from(v),
                   .refinement_levels = v.integer("sweep.refinement_levels"),
                   .form = form_from_string(v.str("simulate.form")),
                   .jobs = jobs_from(v)};
    const std::string dir = v.str("run.out");
    const bool check = v.boolean("sweep.check_bound");
    // Validate the bound configuration before spending time on the sweep.
    std::optional<BoundConfig> cfg;
    if (check) cfg.emplace(bound_from(v, spec.params_base));

    const auto result = sweep(spec);
    std::ostringstream csv;
    write_sweep_csv(csv, result);
    write_file(dir, "sweep.csv", csv.str());
    ordered_json j = sweep_summary_json(result);

    if (cfg) {
        const auto rep = check_upper_bound(result, spec, *cfg);
        std::ostringstream bcsv;
        write_bound_check_csv(bcsv, rep);
        write_file(dir, "bound_check.csv", bcsv.str());
        write_file(dir, "bound_check.json", dump(to_json(rep)));
        j["bound_check"] = to_json(rep);
    }
    write_file(dir, "sweep.json", dump(j));
    out << dump(j);
    return kOk;
}

int cmd_atlas(const Values& v, std::ostream& out) {
    const RangeSpec k_grid{v.num("atlas.kbar_min"), v.num("atlas.kbar_max"), v.integer("atlas.kbar_count")};
    const RangeSpec p_grid{v.num("atlas.p_min"), v.num("atlas.p_max"), v.integer("atlas.p_count")};
    const auto at = atlas(v.integer("model.n"), v.num("model.mu"), v.num("model.nu"), k_grid, p_grid,
                          v.integer("atlas.curve_samples"));
    const std::string dir = v.str("run.out");

    std::ostringstream csv;
    write_atlas_csv(csv, at);
    write_file(dir, "atlas.csv", csv.str());
    std::ostringstream curves;
    write_atlas_curves_csv(curves, at);
    write_file(dir, "atlas_curves.csv", curves.str());
    std::ostringstream svg;
    write_atlas_svg(svg, at);
    write_file(dir, "atlas.svg", svg.str());

    ordered_json j;
    j["n"] = at.n;
    j["mu"] = at.mu;
    j["nu"] = at.nu;
    j["nodes"] = at.verdicts.size();
    j["strauss_couple"] = {{"kbar", at.strauss_couple.kbar}, {"p", at.strauss_couple.p}};
    j["files"] = {"atlas.csv", "atlas_curves.csv", "atlas.svg"};
    out << dump(j);
    return kOk;
}

int cmd_converge(const Values& v, std::ostream& out) {
    ConvergenceSpec spec{.params = ModelParams(3, 0.0, 0.0, 2.0, 0.0),
                         .grid = grid_from(v),
                         .levels = v.integer("converge.levels"),
                         .comparison_time = v.num("converge.time"),
                         .form = form_from_string(v.str("simulate.form")),
                         .options = {},
                         .reference = {},
                         .track_blowup = v.boolean("converge.track_blowup"),
                         .jobs = jobs_from(v)};
    if (v.boolean("converge.free_wave")) {
        const Datum g = compact_bump(v.num("converge.bump_radius"));
        spec.params = spec.params.with_eps(v.num("model.eps"));
        spec.options = RunOptions{.datum = g, .linear = true};
        const double eps = spec.params.eps;
        spec.reference = [g, eps](double t, double r) { return eps * free_wave_3d(t, r, g); };
        spec.form = Form::UForm;
    } else {
        spec.params = model_from(v);
    }
    const auto rep = convergence_study(spec);
    const auto j = to_json(rep);
    write_file(v.str("run.out"), "converge.json", dump(j));
    out << dump(j);
    return kOk;
}

using Handler = int (*)(const Values&, std::ostream&);

const std::map<std::string, Handler> kHandlers = {
    {"classify", cmd_classify}, {"bound", cmd_bound}, {"simulate", cmd_simulate},
    {"sweep", cmd_sweep},       {"atlas", cmd_atlas}, {"converge", cmd_converge},
};

const std::map<std::string, std::string> kDescriptions = {
    {"classify", "Region verdict and lifespan exponent for one parameter tuple (stdout JSON)"},
    {"bound", "Explicit lifespan upper bound T <= C eps^-alpha (stdout JSON)"},
    {"simulate", "One radial run; writes snapshots.csv and run.json"},
    {"sweep", "Blow-up time over an eps sweep; writes sweep.csv, sweep.json and optional bound_check.*"},
    {"atlas", "Region diagram over a (kbar, p) grid; writes atlas.csv, atlas_curves.csv and atlas.svg"},
    {"converge", "Grid-refinement study; writes converge.json"},
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string option_help(const KeySpec& k) {
    std::string h = k.help + " [key " + k.key + ", units " + k.units + ", default ";
    if (!k.default_value.empty()) {
        h += k.default_value;
    } else {
        h += k.key == "sweep.eps" ? "unset" : "required";
    }
    return h + "]";
}

}  // namespace

const std::vector<KeySpec>& key_registry() { return kRegistry; }

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config", "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& k : kRegistry) known = known || k.key == key;
        if (!known) throw ConfigError(key, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Blow-up toolkit for semilinear wave equations with scale-invariant damping and mass",
                 args.empty() ? "blowuplab" : args.front()};
    app.require_subcommand(1);

    struct SubState {
        std::string config;
        std::map<std::string, std::string> flags;
        std::map<std::string, bool> switches;
    };
    std::map<std::string, SubState> states;
    std::map<std::string, CLI::App*> subs;

    for (const auto& [name, keys] : subcommand_keys()) {
        auto* sub = app.add_subcommand(name, kDescriptions.at(name));
        auto& st = states[name];
        sub->add_option("--config", st.config, "flat key = value file; flags override it");
        for (const auto& key : keys) {
            const auto& k = spec_of(key);
            if (k.is_flag) {
                sub->add_flag(k.flag, st.switches[key], option_help(k));
            } else {
                sub->add_option(k.flag, st.flags[key], option_help(k));
            }
        }
        subs[name] = sub;
    }

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) argv.push_back("blowuplab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    std::string name;
    for (const auto& [n, sub] : subs) {
        if (sub->parsed()) name = n;
    }
    auto* sub = subs.at(name);
    const auto& st = states.at(name);

    try {
        std::map<std::string, std::string> merged;
        for (const auto& k : kRegistry) merged[k.key] = k.default_value;
        bool jobs_configured = false;
        if (!st.config.empty()) {
            for (auto& [key, value] : parse_config_text(read_text(st.config))) {
                merged[key] = value;
                jobs_configured = jobs_configured || key == "run.jobs";
            }
        }
        for (const auto& key : subcommand_keys().at(name)) {
            const auto& k = spec_of(key);
            if (sub->count(k.flag) == 0) continue;
            merged[key] = k.is_flag ? (st.switches.at(key) ? "true" : "false") : st.flags.at(key);
            jobs_configured = jobs_configured || key == "run.jobs";
        }
        if (!jobs_configured) {
            if (const char* env = std::getenv("BLOWUPLAB_JOBS"); env != nullptr && *env != '\0') {
                merged["run.jobs"] = env;
            }
        }
        if (name == "converge" && (merged["converge.free_wave"] == "true" || merged["converge.free_wave"] == "1")) {
            for (const auto& key : kFreeWaveOptional) {
                if (merged[key].empty()) merged[key] = "0";
            }
        }
        return kHandlers.at(name)(Values(std::move(merged)), out);
    } catch (const ConfigError& e) {
        err << "error: " << e.field() << ": " << e.what() << "\n";
        return kValidation;
    } catch (const PreconditionError& e) {
        err << "error: " << e.hypothesis() << ": " << e.what() << "\n";
        return kValidation;
    } catch (const UncoveredCase& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace blowup::cli
