#pragma once

// Experiment configuration files: INI-style sections of `key = value` pairs.
// Grid keys accept comma-separated lists; the experiment grid is their
// cartesian product.
//
//   [code]
//   ; one of: preset = <name>, seeds = <seed file>, code_file = <code file>
//   preset = paper-L3
//
//   [channel]
//   p = 0.02, 0.04
//   q = 0, 0.02
//   ; eta sets beta = (1, beta_y, eta) with beta_y defaulting to 0;
//   ; alternatively give one triple beta_x, beta_y, beta_z
//   eta = 1, 10, 100
//
//   [decoder]
//   ; data decoders; [meta_decoder] takes the same keys
//   max_iterations = 32
//   variant = product-sum
//   min_sum_scale = 0.625
//   osd_order = 2
//   osd_span = 40
//   schedule = parallel
//
//   [run]
//   trials = 1000
//   master_seed = 1
//   tailored = false, true
//   single_shot = true
//   channel_update = false
//   threads = 0
//   output = results.csv
//
// Comments are whole lines starting with ';' or '#'.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhp4d/montecarlo.hpp"
#include "lhp4d/presets.hpp"

namespace lhp4d::tools {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CodeSource {
    std::string preset;     // exactly one of the three is set
    std::string seeds_file;
    std::string code_file;
};

struct ExperimentGrid {
    CodeSource code;
    std::vector<double> p{0.04};
    std::vector<double> q{0.0};
    // Either explicit weights (one triple) or an eta list.
    std::vector<double> eta;
    double beta_x = 1.0, beta_y = 1.0, beta_z = 1.0;
    double eta_beta_y = 0.0;
    std::vector<bool> tailored{false};
    std::vector<bool> single_shot{true};
    bool channel_update = false;
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;
    BpConfig data_decoder{};
    BpConfig meta_decoder{};
    std::string output;

    // Grid points in a fixed order: p, q, bias, tailored, single_shot.
    std::vector<ExperimentConfig> expand() const {
        std::vector<ExperimentConfig> out;
        std::vector<ChannelSpec> biases;
        if (eta.empty()) {
            ChannelSpec c;
            c.beta_x = beta_x;
            c.beta_y = beta_y;
            c.beta_z = beta_z;
            biases.push_back(c);
        } else {
            for (double e : eta) {
                ChannelSpec c = ChannelSpec::from_eta(0.0, e);
                c.beta_y = eta_beta_y;
                biases.push_back(c);
            }
        }
        for (double pv : p) {
            for (double qv : q) {
                for (const auto& b : biases) {
                    for (bool t : tailored) {
                        for (bool ss : single_shot) {
                            ExperimentConfig cfg;
                            cfg.channel = b;
                            cfg.channel.p = pv;
                            cfg.channel.q = qv;
                            cfg.tailored = t;
                            cfg.single_shot = ss;
                            cfg.channel_update = channel_update;
                            cfg.trials = trials;
                            cfg.master_seed = master_seed;
                            cfg.threads = threads;
                            cfg.data_decoder = data_decoder;
                            cfg.meta_decoder = meta_decoder;
                            cfg.validate();
                            out.push_back(cfg);
                        }
                    }
                }
            }
        }
        return out;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
    return d;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + v + "' is out of range");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

inline std::vector<bool> parse_bools(const std::string& key, const std::string& v) {
    std::vector<bool> out;
    for (const auto& item : split_list(v)) out.push_back(parse_bool(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

inline void apply_decoder(const boost::property_tree::ptree& sec, const std::string& name, BpConfig& cfg) {
    for (const auto& [key, node] : sec) {
        const std::string full = name + "." + key;
        const std::string v = trim(node.data());
        if (key == "max_iterations") {
            cfg.max_iterations = parse_uint(full, v);
        } else if (key == "variant") {
            if (v == "product-sum") {
                cfg.variant = BpVariant::ProductSum;
            } else if (v == "min-sum") {
                cfg.variant = BpVariant::MinSum;
            } else {
                throw ConfigError(full + ": expected product-sum or min-sum");
            }
        } else if (key == "min_sum_scale") {
            cfg.min_sum_scale = parse_double(full, v);
        } else if (key == "osd_order") {
            cfg.osd_order = parse_uint(full, v);
        } else if (key == "osd_span") {
            cfg.osd_span = parse_uint(full, v);
        } else if (key == "schedule") {
            if (v == "parallel") {
                cfg.schedule = BpSchedule::Parallel;
            } else if (v == "serial") {
                cfg.schedule = BpSchedule::Serial;
            } else {
                throw ConfigError(full + ": expected parallel or serial");
            }
        } else {
            throw ConfigError("unknown key " + full);
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

}  // namespace detail

inline ExperimentGrid parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    using detail::parse_bool;
    using detail::parse_bools;
    using detail::parse_double;
    using detail::parse_doubles;
    using detail::parse_uint;
    using detail::trim;

    ExperimentGrid g;
    bool have_beta_xz = false;
    for (const auto& [section, sec] : tree) {
        if (!sec.data().empty() && sec.empty()) throw ConfigError("key '" + section + "' outside a section");
        if (section == "decoder") {
            detail::apply_decoder(sec, section, g.data_decoder);
            continue;
        }
        if (section == "meta_decoder") {
            detail::apply_decoder(sec, section, g.meta_decoder);
            continue;
        }
        for (const auto& [key, node] : sec) {
            const std::string full = section + "." + key;
            const std::string v = trim(node.data());
            if (section == "code") {
                if (key == "preset") {
                    g.code.preset = v;
                } else if (key == "seeds") {
                    g.code.seeds_file = v;
                } else if (key == "code_file") {
                    g.code.code_file = v;
                } else {
                    throw ConfigError("unknown key " + full);
                }
            } else if (section == "channel") {
                if (key == "p") {
                    g.p = parse_doubles(full, v);
                } else if (key == "q") {
                    g.q = parse_doubles(full, v);
                } else if (key == "eta") {
                    g.eta = parse_doubles(full, v);
                } else if (key == "beta_x") {
                    g.beta_x = parse_double(full, v);
                    have_beta_xz = true;
                } else if (key == "beta_y") {
                    g.beta_y = parse_double(full, v);
                    g.eta_beta_y = g.beta_y;
                } else if (key == "beta_z") {
                    g.beta_z = parse_double(full, v);
                    have_beta_xz = true;
                } else {
                    throw ConfigError("unknown key " + full);
                }
            } else if (section == "run") {
                if (key == "trials") {
                    g.trials = parse_uint(full, v);
                } else if (key == "master_seed") {
                    g.master_seed = parse_uint(full, v);
                } else if (key == "tailored") {
                    g.tailored = parse_bools(full, v);
                } else if (key == "single_shot") {
                    g.single_shot = parse_bools(full, v);
                } else if (key == "channel_update") {
                    g.channel_update = parse_bool(full, v);
                } else if (key == "threads") {
                    g.threads = parse_uint(full, v);
                } else if (key == "output") {
                    g.output = v;
                } else {
                    throw ConfigError("unknown key " + full);
                }
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        }
    }
    // beta_y may accompany eta: it sets the Y weight of every eta grid point.
    if (!g.eta.empty() && have_beta_xz) throw ConfigError("channel: give either eta or beta_x/beta_z, not both");
    const int sources = !g.code.preset.empty() + !g.code.seeds_file.empty() + !g.code.code_file.empty();
    if (sources > 1) throw ConfigError("code: give only one of preset, seeds, code_file");
    if (sources == 0) g.code.preset = "paper-L3";
    if (g.trials == 0) throw ConfigError("run.trials must be >= 1");
    try {
        g.expand();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("channel: ") + e.what());
    }
    return g;
}

}  // namespace lhp4d::tools
