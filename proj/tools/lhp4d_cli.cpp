// lhp4d: build and inspect 4D lifted-product codes, run single-shot
// simulations and parameter sweeps.
//
// Exit codes: 0 success, 1 usage, 2 validation, 3 runtime.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "config.hpp"
#include "lhp4d/chain4d.hpp"
#include "lhp4d/montecarlo.hpp"
#include "lhp4d/presets.hpp"

namespace {

using namespace lhp4d;
using lhp4d::tools::ConfigError;
using lhp4d::tools::ExperimentGrid;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct BuiltCode {
    std::string label;
    std::optional<ChainComplex4D> complex;
    CssCode code;
};

BuiltCode build_from_seeds_arg(const std::string& seeds) {
    BuiltCode b;
    if (seeds == "trivial-scalar") {
        b.label = seeds;
        b.complex = build_preset(seeds);
    } else {
        b.label = seeds;
        ProtographSeeds s;
        try {
            s = parse_seed_file(read_file(seeds));
        } catch (const SeedFileError& e) {
            throw ValidationError(seeds + ": " + e.what());
        }
        try {
            b.complex = build_complex(s);
        } catch (const std::exception& e) {
            throw ValidationError(seeds + ": " + e.what());
        }
    }
    b.code = to_css(*b.complex);
    return b;
}

BuiltCode load_code(const tools::CodeSource& src) {
    if (!src.code_file.empty()) {
        std::ifstream in(src.code_file);
        if (!in) throw std::runtime_error("cannot open '" + src.code_file + "'");
        BuiltCode b;
        b.label = src.code_file;
        try {
            b.code = read_code(in);
        } catch (const std::exception& e) {
            throw ValidationError(src.code_file + ": " + e.what());
        }
        return b;
    }
    if (!src.seeds_file.empty()) return build_from_seeds_arg(src.seeds_file);
    BuiltCode b;
    b.label = src.preset;
    try {
        b.complex = build_preset(src.preset);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    b.code = to_css(*b.complex);
    return b;
}

double mean(const std::vector<std::size_t>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (auto x : v) s += static_cast<double>(x);
    return s / static_cast<double>(v.size());
}

std::string weight_histogram(const std::vector<std::size_t>& w) {
    std::map<std::size_t, std::size_t> h;
    for (auto x : w) ++h[x];
    std::string out;
    for (const auto& [weight, count] : h) {
        if (!out.empty()) out += ' ';
        out += std::to_string(weight) + ":" + std::to_string(count);
    }
    return out.empty() ? "-" : out;
}

void print_code_summary(std::ostream& os, const CssCode& c) {
    os << "n = " << c.n << ", k = " << c.k << "\n";
    os << "hx " << c.hx.rows() << "x" << c.hx.cols() << " rank " << rank(c.hx) << "\n";
    os << "hz " << c.hz.rows() << "x" << c.hz.cols() << " rank " << rank(c.hz) << "\n";
    if (c.has_metachecks()) {
        os << "mx " << c.mx->rows() << "x" << c.mx->cols() << " rank " << rank(*c.mx) << "\n";
        os << "mz " << c.mz->rows() << "x" << c.mz->cols() << " rank " << rank(*c.mz) << "\n";
    }
    os << "sector split = " << c.sector_split << "\n";
    auto wx = c.hx.row_weights();
    auto wz = c.hz.row_weights();
    std::vector<std::size_t> all = wx;
    all.insert(all.end(), wz.begin(), wz.end());
    os << std::setprecision(4) << "average stabilizer row weight = " << mean(all) << "\n";
}

// build ---------------------------------------------------------------------

struct BuildArgs {
    std::string preset;
    std::string seeds;
    std::string output;
    bool distance = false;
    std::size_t distance_budget = 1000;
};

int cmd_build(const BuildArgs& a) {
    if (a.preset.empty() == a.seeds.empty()) throw CLI::ValidationError("build", "give exactly one of --preset, --seeds");
    BuiltCode b;
    if (!a.preset.empty()) {
        tools::CodeSource src;
        src.preset = a.preset;
        b = load_code(src);
    } else {
        b = build_from_seeds_arg(a.seeds);
    }
    std::cout << "code: " << b.label << "\n";
    std::cout << describe(validate_chain(*b.complex));
    print_code_summary(std::cout, b.code);
    const std::size_t rank_formula = b.code.n - rank(b.code.hx) - rank(b.code.hz);
    std::cout << "k = n - rank(hx) - rank(hz): " << (rank_formula == b.code.k ? "yes" : "NO") << "\n";
    if (a.preset.rfind("paper", 0) == 0) {
        std::cout << "reference parameters: [[384, 48, 6]], average weight 5.2; achieved [[" << b.code.n << ", "
                  << b.code.k << "]]\n";
    }
    if (a.distance && b.code.k > 0) {
        DistanceOptions opts;
        opts.budget = a.distance_budget;
        const auto d = estimate_distance(b.code, opts);
        std::cout << "distance: " << d.lower_hint << " <= d <= " << d.upper_bound << "\n";
    }
    const std::string out = a.output.empty() ? b.label + ".code" : a.output;
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    write_code(f, b.code);
    f.close();
    if (!f) throw std::runtime_error("write to '" + out + "' failed");
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

// inspect -------------------------------------------------------------------

int cmd_inspect(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    RawCodeFile raw;
    try {
        raw = read_code_raw(in);
    } catch (const std::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    std::cout << "file: " << path << "\n";
    std::cout << "declared n = " << raw.n << ", k = " << raw.k << ", sector split = " << raw.sector_split << "\n";
    std::vector<std::string> problems;
    auto dims = [](const char* name, const BinaryMatrix& m) {
        std::cout << name << " " << m.rows() << "x" << m.cols() << " rank " << rank(m) << "\n";
        std::cout << "  row weights " << weight_histogram(m.row_weights()) << "\n";
        std::cout << "  column weights " << weight_histogram(m.column_weights()) << "\n";
    };
    dims("hx", raw.hx);
    dims("hz", raw.hz);
    if (raw.mx) dims("mx", *raw.mx);
    if (raw.mz) dims("mz", *raw.mz);
    if (raw.hx.cols() != raw.n || raw.hz.cols() != raw.n) problems.push_back("matrix widths differ from n");
    if (raw.hx.cols() == raw.hz.cols()) {
        const bool css = matmul(raw.hx, raw.hz.transpose()).is_zero();
        std::cout << "hx * hz^T = 0: " << (css ? "ok" : "FAILED") << "\n";
        if (!css) problems.push_back("CSS condition hx * hz^T = 0 violated");
        const std::size_t k = raw.hx.cols() - rank(raw.hx) - rank(raw.hz);
        std::cout << "k from ranks = " << k << "\n";
        if (k != raw.k) problems.push_back("declared k does not match n - rank(hx) - rank(hz)");
    }
    auto meta = [&](const char* name, const std::optional<BinaryMatrix>& m, const BinaryMatrix& h) {
        if (!m) return;
        const bool ok = m->cols() == h.rows() && matmul(*m, h).is_zero();
        std::cout << name << ": " << (ok ? "ok" : "FAILED") << "\n";
        if (!ok) problems.push_back(std::string(name) + " violated");
    };
    meta("mx * hx = 0", raw.mx, raw.hx);
    meta("mz * hz = 0", raw.mz, raw.hz);
    std::vector<std::size_t> all = raw.hx.row_weights();
    const auto wz = raw.hz.row_weights();
    all.insert(all.end(), wz.begin(), wz.end());
    std::cout << std::setprecision(4) << "average stabilizer row weight = " << mean(all) << "\n";
    if (problems.empty()) {
        std::cout << "status: ok\n";
        return kExitOk;
    }
    std::cout << "status: FAILED\n";
    for (const auto& p : problems) std::cout << "  " << p << "\n";
    return kExitValidation;
}

// simulate / sweep ------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string preset;
    std::string seeds;
    std::string code_file;
    std::string output;
    std::string trial_log;
    std::vector<double> p, q, eta;
    std::vector<std::string> tailored, single_shot;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool deterministic = false;
};

std::vector<bool> to_bools(const std::string& opt, const std::vector<std::string>& v) {
    std::vector<bool> out;
    for (const auto& s : v) out.push_back(tools::detail::parse_bool(opt, s));
    return out;
}

ExperimentGrid grid_from_args(const SimulateArgs& a) {
    ExperimentGrid g;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw std::runtime_error("cannot open '" + a.config + "'");
        g = tools::parse_config(in);
    }
    const int sources = !a.preset.empty() + !a.seeds.empty() + !a.code_file.empty();
    if (sources > 1) throw CLI::ValidationError("simulate", "give only one of --preset, --seeds, --code");
    if (sources == 1) g.code = tools::CodeSource{a.preset, a.seeds, a.code_file};
    if (g.code.preset.empty() && g.code.seeds_file.empty() && g.code.code_file.empty()) g.code.preset = "paper-L3";
    if (!a.p.empty()) g.p = a.p;
    if (!a.q.empty()) g.q = a.q;
    if (!a.eta.empty()) g.eta = a.eta;
    if (!a.tailored.empty()) g.tailored = to_bools("--tailored", a.tailored);
    if (!a.single_shot.empty()) g.single_shot = to_bools("--single-shot", a.single_shot);
    if (a.trials) g.trials = *a.trials;
    if (a.seed) g.master_seed = *a.seed;
    if (a.threads) g.threads = *a.threads;
    if (!a.output.empty()) g.output = a.output;
    if (g.trials == 0) throw ConfigError("trials must be >= 1");
    return g;
}

std::string bool_list(const std::vector<bool>& v) {
    std::string s;
    for (bool b : v) s += (s.empty() ? "" : ", ") + std::string(b ? "true" : "false");
    return s;
}

std::string number_list(const std::vector<double>& v) {
    std::string s;
    for (double d : v) s += (s.empty() ? "" : ", ") + format_number(d);
    return s;
}

std::string decoder_ini(const BpConfig& c) {
    std::ostringstream os;
    os << "max_iterations = " << c.max_iterations << "\n"
       << "variant = " << (c.variant == BpVariant::ProductSum ? "product-sum" : "min-sum") << "\n"
       << "min_sum_scale = " << format_number(c.min_sum_scale) << "\n"
       << "osd_order = " << c.osd_order << "\n"
       << "osd_span = " << c.osd_span << "\n"
       << "schedule = " << (c.schedule == BpSchedule::Parallel ? "parallel" : "serial") << "\n";
    return os.str();
}

// Fully resolved configuration, readable back by the config parser.
std::string resolved_config(const ExperimentGrid& g) {
    std::ostringstream os;
    os << "[code]\n";
    if (!g.code.preset.empty()) os << "preset = " << g.code.preset << "\n";
    if (!g.code.seeds_file.empty()) os << "seeds = " << g.code.seeds_file << "\n";
    if (!g.code.code_file.empty()) os << "code_file = " << g.code.code_file << "\n";
    os << "\n[channel]\np = " << number_list(g.p) << "\nq = " << number_list(g.q) << "\n";
    if (g.eta.empty()) {
        os << "beta_x = " << format_number(g.beta_x) << "\nbeta_y = " << format_number(g.beta_y)
           << "\nbeta_z = " << format_number(g.beta_z) << "\n";
    } else {
        os << "eta = " << number_list(g.eta) << "\nbeta_y = " << format_number(g.eta_beta_y) << "\n";
    }
    os << "\n[decoder]\n" << decoder_ini(g.data_decoder) << "\n[meta_decoder]\n" << decoder_ini(g.meta_decoder);
    os << "\n[run]\ntrials = " << g.trials << "\nmaster_seed = " << g.master_seed << "\ntailored = "
       << bool_list(g.tailored) << "\nsingle_shot = " << bool_list(g.single_shot)
       << "\nchannel_update = " << (g.channel_update ? "true" : "false") << "\nthreads = " << g.threads << "\n";
    if (!g.output.empty()) os << "output = " << g.output << "\n";
    return os.str();
}

// Drops a torn final line left by an interrupted run, then writes the header
// if the file is new. Returns the grid points already present.
std::set<std::string> prepare_results_file(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) {
        std::string content = read_file(path);
        if (!content.empty() && content.back() != '\n') {
            content.erase(content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1);
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << content;
        }
    }
    auto done = completed_grid_points(path);
    if (!fs::exists(path) || fs::file_size(path) == 0) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << csv_header() << "\n";
    }
    return done;
}

int run_grid(const ExperimentGrid& g, const std::string& trial_log, bool deterministic) {
    const BuiltCode b = load_code(g.code);
    const auto points = g.expand();
    std::cout << "code " << b.label << ": n = " << b.code.n << ", k = " << b.code.k << "\n";
    if (b.code.k == 0) throw ValidationError("code has k = 0; nothing to protect");
    for (const auto& cfg : points) {
        if (cfg.single_shot && !b.code.has_metachecks()) {
            throw ValidationError("single_shot = true needs a code with metachecks");
        }
    }

    std::set<std::string> done;
    std::ofstream csv;
    if (!g.output.empty()) {
        done = prepare_results_file(g.output);
        csv.open(g.output, std::ios::binary | std::ios::app);
        if (!csv) throw std::runtime_error("cannot write '" + g.output + "'");
        std::ofstream side(g.output + ".ini", std::ios::binary | std::ios::trunc);
        side << resolved_config(g);
    }
    std::ofstream tlog;
    if (!trial_log.empty()) {
        tlog.open(trial_log, std::ios::binary | std::ios::trunc);
        if (!tlog) throw std::runtime_error("cannot write '" + trial_log + "'");
        tlog << "p,q,beta_x,beta_y,beta_z,eta,tailored,single_shot,trial,failure,flipped_x,detected_x,corrected_x,"
                "flipped_z,detected_z,corrected_z\n";
    }
    if (g.output.empty()) std::cout << csv_header() << "\n";

    for (auto cfg : points) {
        const std::string key = grid_key(cfg);
        if (done.count(key)) {
            std::cerr << "skip (already in " << g.output << "): " << key << "\n";
            continue;
        }
        cfg.keep_outcomes = tlog.is_open();
        RunStats st = run_experiment(b.code, cfg);
        if (deterministic) st.wall_seconds = 0.0;
        const std::string row = csv_row(cfg, st);
        if (csv.is_open()) {
            csv << row << "\n";
            csv.flush();
            if (!csv) throw std::runtime_error("write to '" + g.output + "' failed");
            std::cout << row << "\n";
        } else {
            std::cout << row << "\n";
        }
        for (std::size_t t = 0; t < st.outcomes.size(); ++t) {
            const auto& o = st.outcomes[t];
            tlog << key << ',' << t << ',' << (o.logical_failure ? 1 : 0) << ',' << o.x.flipped << ','
                 << o.x.detected << ',' << o.x.corrected << ',' << o.z.flipped << ',' << o.z.detected << ','
                 << o.z.corrected << "\n";
        }
    }
    return kExitOk;
}

void add_grid_options(CLI::App* cmd, SimulateArgs& a) {
    cmd->add_option("-c,--config", a.config, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", a.preset, "code preset (see 'build --list')");
    cmd->add_option("--seeds", a.seeds, "seed file or 'trivial-scalar'");
    cmd->add_option("--code", a.code_file, "code file written by 'build'");
    cmd->add_option("-o,--output", a.output, "results CSV (appended to; finished grid points are skipped)");
    cmd->add_option("--p", a.p, "total data error probabilities")->delimiter(',');
    cmd->add_option("--q", a.q, "measurement error probabilities")->delimiter(',');
    cmd->add_option("--eta", a.eta, "bias ratios p_Z / p_X (beta = (1, 0, eta))")->delimiter(',');
    cmd->add_option("--tailored", a.tailored, "tailoring modes, e.g. false,true")->delimiter(',');
    cmd->add_option("--single-shot", a.single_shot, "single-shot modes, e.g. true,false")->delimiter(',');
    cmd->add_option("--trials", a.trials, "trials per grid point");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("-j,--threads", a.threads, "worker threads (0 = all cores)");
    cmd->add_option("--trial-log", a.trial_log, "per-trial CSV with detection and correction counts");
    cmd->add_flag("--deterministic", a.deterministic, "write wall_seconds as 0 so reruns are byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bias-tailored 4D lifted-product codes with single-shot decoding"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lhp4d 1.0");

    BuildArgs build;
    bool list = false;
    auto* b = app.add_subcommand("build", "build a code from a preset or seed file and write it out");
    auto* preset_opt = b->add_option("--preset", build.preset, "preset name");
    auto* seeds_opt = b->add_option("--seeds", build.seeds, "seed file, or 'trivial-scalar'");
    preset_opt->excludes(seeds_opt);
    b->add_option("-o,--output", build.output, "code file (default <name>.code)");
    b->add_flag("--distance", build.distance, "estimate the minimum distance");
    b->add_option("--distance-budget", build.distance_budget, "random information-set trials for --distance");
    b->add_flag("--list", list, "list presets and exit");

    std::string inspect_path;
    auto* in = app.add_subcommand("inspect", "report dimensions, ranks, weights and validity of a code file");
    in->add_option("file", inspect_path, "code file")->required();

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run a simulation grid and write the results CSV");
    add_grid_options(s, sim);

    std::vector<std::string> sweep_configs;
    std::size_t sweep_threads = 0;
    bool sweep_det = false;
    auto* sw = app.add_subcommand("sweep", "run several configuration files, each into its own output");
    sw->add_option("configs", sweep_configs, "configuration files (each needs run.output)")
        ->required()
        ->check(CLI::ExistingFile);
    sw->add_option("-j,--threads", sweep_threads, "worker threads (0 = from config)");
    sw->add_flag("--deterministic", sweep_det, "write wall_seconds as 0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*b) {
            if (list) {
                for (const auto& p : list_presets()) std::cout << p.name << "  " << p.description << "\n";
                return kExitOk;
            }
            return cmd_build(build);
        }
        if (*in) return cmd_inspect(inspect_path);
        if (*s) return run_grid(grid_from_args(sim), sim.trial_log, sim.deterministic);
        if (*sw) {
            for (const auto& path : sweep_configs) {
                SimulateArgs a;
                a.config = path;
                if (sweep_threads) a.threads = sweep_threads;
                ExperimentGrid g = grid_from_args(a);
                if (g.output.empty()) throw ConfigError(path + ": sweep needs run.output");
                std::cout << "== " << path << "\n";
                run_grid(g, "", sweep_det);
            }
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
