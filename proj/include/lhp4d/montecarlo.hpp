#pragma once

// Single-shot CSS simulation: sample data and measurement noise, repair the
// noisy syndromes with the metachecks, decode Z then X, and test the residual
// against the logical operators. Trials run concurrently on independent
// random streams and are reduced in trial order.

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "css.hpp"
#include "decoder.hpp"
#include "noise.hpp"

namespace lhp4d {

struct ExperimentConfig {
    ChannelSpec channel;
    bool tailored = false;
    bool single_shot = true;
    // Raise the X decoder's priors on supp(Z estimate) to P(Y) / (P(Y) + P(Z)).
    bool channel_update = false;
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;  // 0 = hardware concurrency
    BpConfig data_decoder{};
    BpConfig meta_decoder{};
    // Priors are clamped to [floor, 1 - floor]; BP needs finite likelihoods.
    double prior_floor = 1e-9;
    bool keep_outcomes = false;

    void validate() const {
        channel.validate();
        if (trials == 0) throw std::invalid_argument("trials must be >= 1");
        if (!(prior_floor > 0.0 && prior_floor < 0.5)) throw std::invalid_argument("prior_floor must lie in (0, 0.5)");
        data_decoder.validate();
        meta_decoder.validate();
    }
};

struct SectorOutcome {
    DecodeStage stage = DecodeStage::Bp;
    bool bp_converged = true;
    std::size_t flipped = 0;    // measurement faults on this sector's syndrome
    std::size_t detected = 0;   // faults touching at least one violated metacheck
    std::size_t corrected = 0;  // faults the repair flipped back
    bool repair_failed = false;
};

struct TrialOutcome {
    bool logical_failure = false;
    SectorOutcome x;  // bit flips: hz syndrome, mz repair
    SectorOutcome z;  // phase flips: hx syndrome, mx repair
    std::size_t residual_weight = 0;

    bool operator==(const TrialOutcome& o) const {
        auto same = [](const SectorOutcome& a, const SectorOutcome& b) {
            return a.stage == b.stage && a.bp_converged == b.bp_converged && a.flipped == b.flipped &&
                   a.detected == b.detected && a.corrected == b.corrected && a.repair_failed == b.repair_failed;
        };
        return logical_failure == o.logical_failure && residual_weight == o.residual_weight && same(x, o.x) &&
               same(z, o.z);
    }
};

struct Syndromes {
    BitVector for_x;  // hz * ex
    BitVector for_z;  // hx * ez
};

inline Syndromes extract_syndromes(const CssCode& code, const PauliError& err) {
    if (err.size() != code.n) throw std::invalid_argument("error length != n");
    return {code.hz * err.ex, code.hx * err.ez};
}

inline bool failure_test(const BitVector& res_x, const BitVector& res_z, const BinaryMatrix& lx, const BinaryMatrix& lz) {
    return (lz * res_x).any() || (lx * res_z).any();
}

struct RepairResult {
    BitVector repaired;
    BitVector u_estimate;
    bool failed = false;
};

inline RepairResult metacheck_repair(const BpOsdDecoder& meta, const BitVector& noisy, double q, double floor = 1e-9) {
    const BitVector metasyndrome = meta.matrix() * noisy;
    RepairResult r{noisy, BitVector(noisy.size()), false};
    if (metasyndrome.none()) return r;
    const double prior = std::clamp(q, floor, 1.0 - floor);
    const std::vector<double> priors(noisy.size(), prior);
    DecodeResult d = meta.decode(metasyndrome, priors);
    if (d.stage == DecodeStage::Failed) {
        r.failed = true;
        return r;
    }
    r.u_estimate = std::move(d.estimate);
    r.repaired ^= r.u_estimate;
    return r;
}

// Per-qubit Pauli probabilities in the CSS frame of the decoders.
struct FramePriors {
    std::vector<double> px, py, pz;
};

inline FramePriors frame_priors(const ChannelSpec& spec, const BitVector& swapped) {
    const PauliProbs pr = channel_probs(spec);
    FramePriors f;
    const std::size_t n = swapped.size();
    f.px.assign(n, pr.px);
    f.py.assign(n, pr.py);
    f.pz.assign(n, pr.pz);
    for (auto i : swapped.support()) std::swap(f.px[i], f.pz[i]);
    return f;
}

class Simulator {
public:
    Simulator(CssCode code, ExperimentConfig cfg) : code_(std::move(code)), cfg_(std::move(cfg)) {
        cfg_.validate();
        if (cfg_.single_shot && !code_.has_metachecks()) {
            throw std::invalid_argument("single-shot mode needs a code with metachecks");
        }
        swapped_ = BitVector(code_.n);
        if (cfg_.tailored) {
            if (code_.sector_split == 0 || code_.sector_split > code_.n) {
                throw std::invalid_argument("tailored mode needs a sector split in (0, n]");
            }
            for (std::size_t i = code_.sector_split; i < code_.n; ++i) swapped_.set(i);
        }
        cfg_.channel.sector_swap_boundary.reset();
        priors_ = frame_priors(cfg_.channel, swapped_);
        dec_x_ = BpOsdDecoder(code_.hz, cfg_.data_decoder);
        dec_z_ = BpOsdDecoder(code_.hx, cfg_.data_decoder);
        if (code_.has_metachecks()) {
            dec_mx_ = BpOsdDecoder(*code_.mx, cfg_.meta_decoder);
            dec_mz_ = BpOsdDecoder(*code_.mz, cfg_.meta_decoder);
        }
    }

    const CssCode& code() const { return code_; }
    const ExperimentConfig& config() const { return cfg_; }
    const BitVector& swapped_sector() const { return swapped_; }

    // Channel used to sample CSS-frame errors directly.
    ChannelSpec frame_channel() const {
        ChannelSpec c = cfg_.channel;
        if (cfg_.tailored) c.sector_swap_boundary = code_.sector_split;
        return c;
    }

    TrialOutcome run_trial(std::uint64_t trial_index) const {
        RngStream rng(cfg_.master_seed, trial_index);
        const PauliError e = sample_pauli_error(frame_channel(), code_.n, rng);
        const Syndromes s = extract_syndromes(code_, e);
        BitVector ex_hat, ez_hat;
        TrialOutcome out = decode_round(s, rng, ex_hat, ez_hat);
        const BitVector res_x = e.ex + ex_hat;
        const BitVector res_z = e.ez + ez_hat;
        out.logical_failure = failure_test(res_x, res_z, code_.lx, code_.lz);
        BitVector any = res_x;
        for (auto i : res_z.support()) any.set(i);
        out.residual_weight = any.weight();
        return out;
    }

    // The same trial seen from the rotated code: the error is sampled in the
    // physical frame under the plain channel, syndromes and the failure test
    // use symplectic products with the rotated stabilizers and logicals.
    TrialOutcome run_trial_physical(const TailoredCode& rotated, std::uint64_t trial_index) const {
        if (rotated.rotated != swapped_) throw std::invalid_argument("rotation mask does not match the simulated sector");
        RngStream rng(cfg_.master_seed, trial_index);
        ChannelSpec plain = cfg_.channel;
        plain.sector_swap_boundary.reset();
        const PauliError e = sample_pauli_error(plain, code_.n, rng);

        const BinaryMatrix sx = rotated.stabilizer_x_part();
        const BinaryMatrix sz = rotated.stabilizer_z_part();
        const BitVector all = sx * e.ez + sz * e.ex;
        const std::size_t nx = code_.hx.rows();
        Syndromes s{all.slice(nx, all.size()), all.slice(0, nx)};

        BitVector fx_hat, fz_hat;
        TrialOutcome out = decode_round(s, rng, fx_hat, fz_hat);
        // back to the physical frame
        BitVector ex_hat = fx_hat, ez_hat = fz_hat;
        for (auto i : rotated.rotated.support()) {
            ex_hat.set(i, fz_hat.get(i));
            ez_hat.set(i, fx_hat.get(i));
        }
        const BitVector rx = e.ex + ex_hat;
        const BitVector rz = e.ez + ez_hat;
        const BitVector lx_hit = rotated.logical_x_part() * rz + rotated.logical_z_part() * rx;
        out.logical_failure = lx_hit.any();
        BitVector any = rx;
        for (auto i : rz.support()) any.set(i);
        out.residual_weight = any.weight();
        return out;
    }

private:
    // Steps shared by both frames once the noiseless syndromes are known.
    TrialOutcome decode_round(const Syndromes& s, RngStream& rng, BitVector& ex_hat, BitVector& ez_hat) const {
        TrialOutcome out;
        const BitVector ux = sample_measurement_error(cfg_.channel.q, s.for_x.size(), rng);
        const BitVector uz = sample_measurement_error(cfg_.channel.q, s.for_z.size(), rng);
        BitVector noisy_x = s.for_x + ux;
        BitVector noisy_z = s.for_z + uz;
        out.x.flipped = ux.weight();
        out.z.flipped = uz.weight();

        if (cfg_.single_shot) {
            repair(dec_mz_, noisy_x, ux, out.x);
            repair(dec_mx_, noisy_z, uz, out.z);
        }

        const double f = cfg_.prior_floor;
        auto clamp = [f](double v) { return std::clamp(v, f, 1.0 - f); };
        const std::size_t n = code_.n;
        std::vector<double> prior_z(n), prior_x(n);
        for (std::size_t i = 0; i < n; ++i) {
            prior_z[i] = clamp(priors_.pz[i] + priors_.py[i]);
            prior_x[i] = clamp(priors_.px[i] + priors_.py[i]);
        }

        const DecodeResult dz = dec_z_.decode(noisy_z, prior_z);
        if (cfg_.channel_update) {
            for (auto i : dz.estimate.support()) {
                const double yz = priors_.py[i] + priors_.pz[i];
                prior_x[i] = clamp(yz > 0.0 ? priors_.py[i] / yz : 0.0);
            }
        }
        const DecodeResult dx = dec_x_.decode(noisy_x, prior_x);
        out.z.stage = dz.stage;
        out.z.bp_converged = dz.converged;
        out.x.stage = dx.stage;
        out.x.bp_converged = dx.converged;
        ex_hat = dx.estimate;
        ez_hat = dz.estimate;
        return out;
    }

    void repair(const BpOsdDecoder& meta, BitVector& noisy, const BitVector& u, SectorOutcome& so) const {
        if (u.any()) {
            const BitVector violated = meta.matrix() * noisy;
            const BinaryMatrix& m = meta.matrix();
            for (auto i : u.support()) {
                bool hit = false;
                for (std::size_t r = 0; r < m.rows() && !hit; ++r) hit = m.get(r, i) && violated.get(r);
                if (hit) ++so.detected;
            }
        }
        RepairResult rr = metacheck_repair(meta, noisy, cfg_.channel.q, cfg_.prior_floor);
        so.repair_failed = rr.failed;
        BitVector agree = rr.u_estimate;
        agree &= u;
        so.corrected = agree.weight();
        noisy = std::move(rr.repaired);
    }

    CssCode code_;
    ExperimentConfig cfg_;
    BitVector swapped_;
    FramePriors priors_;
    BpOsdDecoder dec_x_, dec_z_, dec_mx_, dec_mz_;
};

struct StageHistogram {
    std::array<std::size_t, 4> counts{};  // indexed by DecodeStage
    void add(DecodeStage s) { ++counts[static_cast<std::size_t>(s)]; }
    std::size_t operator[](DecodeStage s) const { return counts[static_cast<std::size_t>(s)]; }
    std::size_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

struct RunStats {
    std::size_t trials = 0;
    std::size_t failures = 0;
    double wer = 0.0;
    double wer_stderr = 0.0;
    double detection_x = std::nan("");
    double detection_z = std::nan("");
    double correction_x = std::nan("");
    double correction_z = std::nan("");
    std::size_t flipped_trials_x = 0;  // trials contributing to the x-sector rates
    std::size_t flipped_trials_z = 0;
    std::size_t repair_failures = 0;
    StageHistogram stages_x;
    StageHistogram stages_z;
    double wall_seconds = 0.0;
    std::vector<TrialOutcome> outcomes;  // filled when keep_outcomes is set

    double stage_fraction(DecodeStage s) const {
        const std::size_t total = stages_x.total() + stages_z.total();
        return total == 0 ? 0.0 : static_cast<double>(stages_x[s] + stages_z[s]) / static_cast<double>(total);
    }

    // Statistical content only; wall time and kept outcomes are ignored.
    bool same_statistics(const RunStats& o) const {
        auto eq = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
        return trials == o.trials && failures == o.failures && eq(wer, o.wer) && eq(wer_stderr, o.wer_stderr) &&
               eq(detection_x, o.detection_x) && eq(detection_z, o.detection_z) && eq(correction_x, o.correction_x) &&
               eq(correction_z, o.correction_z) && flipped_trials_x == o.flipped_trials_x &&
               flipped_trials_z == o.flipped_trials_z && repair_failures == o.repair_failures &&
               stages_x.counts == o.stages_x.counts && stages_z.counts == o.stages_z.counts;
    }
};

inline double detection_rate(const SectorOutcome& s) {
    return static_cast<double>(s.detected) / static_cast<double>(s.flipped);
}
inline double correction_rate(const SectorOutcome& s) {
    return static_cast<double>(s.corrected) / static_cast<double>(s.flipped);
}

// Reduction in trial order, so the result does not depend on scheduling.
inline RunStats aggregate(const std::vector<TrialOutcome>& outcomes) {
    RunStats st;
    st.trials = outcomes.size();
    double det_x = 0, det_z = 0, cor_x = 0, cor_z = 0;
    for (const auto& o : outcomes) {
        if (o.logical_failure) ++st.failures;
        st.stages_x.add(o.x.stage);
        st.stages_z.add(o.z.stage);
        if (o.x.repair_failed || o.z.repair_failed) ++st.repair_failures;
        if (o.x.flipped > 0) {
            ++st.flipped_trials_x;
            det_x += detection_rate(o.x);
            cor_x += correction_rate(o.x);
        }
        if (o.z.flipped > 0) {
            ++st.flipped_trials_z;
            det_z += detection_rate(o.z);
            cor_z += correction_rate(o.z);
        }
    }
    if (st.trials > 0) {
        st.wer = static_cast<double>(st.failures) / static_cast<double>(st.trials);
        st.wer_stderr = std::sqrt(st.wer * (1.0 - st.wer) / static_cast<double>(st.trials));
    }
    if (st.flipped_trials_x > 0) {
        det_x /= static_cast<double>(st.flipped_trials_x);
        cor_x /= static_cast<double>(st.flipped_trials_x);
        st.detection_x = det_x;
        st.correction_x = cor_x;
    }
    if (st.flipped_trials_z > 0) {
        det_z /= static_cast<double>(st.flipped_trials_z);
        cor_z /= static_cast<double>(st.flipped_trials_z);
        st.detection_z = det_z;
        st.correction_z = cor_z;
    }
    return st;
}

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

template <class TrialFn>
std::vector<TrialOutcome> run_trials(std::size_t trials, std::size_t threads, TrialFn&& fn) {
    std::vector<TrialOutcome> outcomes(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t t = next++; t < trials; t = next++) outcomes[t] = fn(static_cast<std::uint64_t>(t));
    };
    const std::size_t workers = std::min(resolve_threads(threads), trials);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    return outcomes;
}

inline RunStats run_experiment(const CssCode& code, const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const Simulator sim(code, cfg);
    auto outcomes = run_trials(cfg.trials, cfg.threads, [&](std::uint64_t t) { return sim.run_trial(t); });
    RunStats st = aggregate(outcomes);
    if (cfg.keep_outcomes) st.outcomes = std::move(outcomes);
    st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return st;
}

// Results table -------------------------------------------------------------

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "p",           "q",           "beta_x",       "beta_y",       "beta_z",      "eta",       "tailored",
        "single_shot", "trials",      "failures",     "wer",          "wer_stderr",  "detection_x", "detection_z",
        "correction_x", "correction_z", "bp_conv_frac", "osd0_frac",  "osdw_frac",   "wall_seconds"};
    return cols;
}

// Shortest round-trip decimal; "nan" and "inf" spelled the usual way.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string csv_header() {
    std::string h;
    for (const auto& c : csv_columns()) {
        if (!h.empty()) h += ',';
        h += c;
    }
    return h;
}

// Grid-point key: the parameter columns, formatted exactly as written.
inline std::string grid_key(const ExperimentConfig& cfg) {
    const auto& c = cfg.channel;
    return format_number(c.p) + ',' + format_number(c.q) + ',' + format_number(c.beta_x) + ',' +
           format_number(c.beta_y) + ',' + format_number(c.beta_z) + ',' + format_number(c.eta()) + ',' +
           (cfg.tailored ? "true" : "false") + ',' + (cfg.single_shot ? "true" : "false");
}

inline std::string csv_row(const ExperimentConfig& cfg, const RunStats& st) {
    std::ostringstream os;
    os << grid_key(cfg) << ',' << st.trials << ',' << st.failures << ',' << format_number(st.wer) << ','
       << format_number(st.wer_stderr) << ',' << format_number(st.detection_x) << ','
       << format_number(st.detection_z) << ',' << format_number(st.correction_x) << ','
       << format_number(st.correction_z) << ',' << format_number(st.stage_fraction(DecodeStage::Bp)) << ','
       << format_number(st.stage_fraction(DecodeStage::Osd0)) << ','
       << format_number(st.stage_fraction(DecodeStage::OsdW)) << ',' << format_number(st.wall_seconds);
    return os.str();
}

// Keys of grid points already present in a results file. A missing file is an
// empty set; a file with a different header is rejected.
inline std::set<std::string> completed_grid_points(const std::string& path) {
    std::set<std::string> keys;
    std::ifstream in(path);
    if (!in) return keys;
    std::string line;
    if (!std::getline(in, line)) return keys;
    if (line != csv_header()) throw std::runtime_error("existing results file '" + path + "' has a different header");
    while (std::getline(in, line)) {
        if (std::count(line.begin(), line.end(), ',') + 1 != static_cast<long>(csv_columns().size())) continue;
        std::size_t pos = 0;
        for (int commas = 0; commas < 8; ++commas) pos = line.find(',', pos) + 1;
        --pos;
        keys.insert(line.substr(0, pos));
    }
    return keys;
}

}  // namespace lhp4d
