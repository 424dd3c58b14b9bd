#pragma once

// Syndrome decoding: log-domain belief propagation on the Tanner graph with
// ordered-statistics post-processing (BP+OSD).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gf2.hpp"

namespace lhp4d {

enum class BpVariant { ProductSum, MinSum };
enum class BpSchedule { Parallel, Serial };
enum class DecodeStage { Bp, Osd0, OsdW, Failed };

inline const char* to_string(DecodeStage s) {
    switch (s) {
        case DecodeStage::Bp: return "bp";
        case DecodeStage::Osd0: return "osd0";
        case DecodeStage::OsdW: return "osdw";
        case DecodeStage::Failed: return "failed";
    }
    return "?";
}

struct BpConfig {
    std::size_t max_iterations = 32;
    BpVariant variant = BpVariant::ProductSum;
    double min_sum_scale = 0.625;
    std::size_t osd_order = 2;
    // Number of least-reliable non-pivot positions the order-w sweep draws from.
    std::size_t osd_span = 40;
    BpSchedule schedule = BpSchedule::Parallel;

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
        if (!(min_sum_scale > 0.0 && min_sum_scale <= 1.0)) throw std::invalid_argument("min_sum_scale must be in (0, 1]");
    }
};

struct DecodeResult {
    BitVector estimate;
    bool converged = false;            // BP alone reproduced the syndrome
    std::vector<double> soft_values;   // posterior log-likelihood ratios, log(P(0)/P(1))
    DecodeStage stage = DecodeStage::Bp;
    std::size_t iterations = 0;
};

inline double prior_llr(double p) { return std::log((1.0 - p) / p); }

namespace detail {

// Exact pairwise check-node combination of two LLRs.
inline double boxplus(double a, double b) {
    const double sign = (a < 0) != (b < 0) ? -1.0 : 1.0;
    return sign * std::min(std::fabs(a), std::fabs(b)) + std::log1p(std::exp(-std::fabs(a + b))) -
           std::log1p(std::exp(-std::fabs(a - b)));
}

inline double minsum(double a, double b) {
    const double sign = (a < 0) != (b < 0) ? -1.0 : 1.0;
    return sign * std::min(std::fabs(a), std::fabs(b));
}

}  // namespace detail

// Decoder for one parity-check matrix. The Tanner graph is built once; all
// decode calls are const and keep their scratch state local, so one instance
// can serve concurrent callers.
class BpOsdDecoder {
public:
    BpOsdDecoder() = default;
    explicit BpOsdDecoder(BinaryMatrix h, BpConfig cfg = {}) : h_(std::move(h)), graph_(h_), cfg_(cfg) {
        cfg_.validate();
        check_edges_.resize(h_.rows());
        var_edges_.resize(h_.cols());
        for (std::size_t c = 0; c < h_.rows(); ++c) {
            for (auto v : graph_.row(c)) {
                const std::size_t e = edge_var_.size();
                edge_var_.push_back(v);
                check_edges_[c].push_back(e);
                var_edges_[v].push_back(e);
            }
        }
    }

    const BinaryMatrix& matrix() const { return h_; }
    const BpConfig& config() const { return cfg_; }

    DecodeResult bp_decode(const BitVector& syndrome, std::span<const double> priors) const {
        validate_inputs(syndrome, priors);
        const std::size_t n = h_.cols();
        std::vector<double> llr(n);
        for (std::size_t v = 0; v < n; ++v) llr[v] = prior_llr(priors[v]);

        DecodeResult res;
        res.estimate = BitVector(n);
        res.soft_values = llr;
        for (std::size_t v = 0; v < n; ++v) {
            if (llr[v] < 0) res.estimate.set(v);
        }
        if (h_ * res.estimate == syndrome) {
            res.converged = true;
            return res;
        }

        const std::size_t edges = edge_var_.size();
        std::vector<double> to_check(edges);
        std::vector<double> to_var(edges, 0.0);
        for (std::size_t e = 0; e < edges; ++e) to_check[e] = llr[edge_var_[e]];
        std::vector<double> total = llr;
        std::vector<double> fwd, bwd;

        for (std::size_t it = 1; it <= cfg_.max_iterations; ++it) {
            res.iterations = it;
            if (cfg_.schedule == BpSchedule::Parallel) {
                for (std::size_t c = 0; c < h_.rows(); ++c) update_check(c, syndrome.get(c), to_check, to_var, fwd, bwd);
                for (std::size_t v = 0; v < n; ++v) {
                    double t = llr[v];
                    for (auto e : var_edges_[v]) t += to_var[e];
                    total[v] = t;
                    for (auto e : var_edges_[v]) to_check[e] = t - to_var[e];
                }
            } else {
                // Check-serial: each check sees the freshest variable beliefs.
                for (std::size_t c = 0; c < h_.rows(); ++c) {
                    for (auto e : check_edges_[c]) to_check[e] = total[edge_var_[e]] - to_var[e];
                    std::vector<double> old;
                    old.reserve(check_edges_[c].size());
                    for (auto e : check_edges_[c]) old.push_back(to_var[e]);
                    update_check(c, syndrome.get(c), to_check, to_var, fwd, bwd);
                    for (std::size_t i = 0; i < check_edges_[c].size(); ++i) {
                        const auto e = check_edges_[c][i];
                        total[edge_var_[e]] += to_var[e] - old[i];
                    }
                }
            }
            BitVector hard(n);
            for (std::size_t v = 0; v < n; ++v) {
                if (total[v] < 0) hard.set(v);
            }
            res.estimate = std::move(hard);
            if (h_ * res.estimate == syndrome) {
                res.converged = true;
                break;
            }
        }
        res.soft_values = std::move(total);
        return res;
    }

    // Ordered-statistics post-processing. Columns are ranked most-likely-flipped
    // first (ascending soft value, ties by column index); the first rank(h)
    // independent columns form the information set. Order 0 solves on that set;
    // order w also tries every pattern of up to w flips among the first
    // `osd_span` remaining columns and keeps the cheapest syndrome-consistent
    // candidate. Costs default to Hamming weight.
    std::optional<BitVector> osd(const BitVector& syndrome, std::span<const double> soft_values, std::size_t order,
                                 std::span<const double> costs = {}, bool* used_higher_order = nullptr) const {
        bool consistent = true;
        auto x = osd_impl(syndrome, soft_values, order, costs, used_higher_order, &consistent);
        if (!consistent) return std::nullopt;
        return x;
    }

    // BP first; OSD only when BP does not reproduce the syndrome. OSD candidates
    // are scored by their prior log-likelihood cost. A syndrome outside the
    // column space yields stage Failed with a best-effort estimate that matches
    // the syndrome on the information-set rows only.
    DecodeResult decode(const BitVector& syndrome, std::span<const double> priors) const {
        DecodeResult res = bp_decode(syndrome, priors);
        if (res.converged) {
            res.stage = DecodeStage::Bp;
            return res;
        }
        std::vector<double> costs(priors.size());
        for (std::size_t v = 0; v < priors.size(); ++v) costs[v] = prior_llr(priors[v]);
        bool higher = false;
        bool consistent = true;
        res.estimate = osd_impl(syndrome, res.soft_values, cfg_.osd_order, costs, &higher, &consistent);
        if (!consistent) {
            res.stage = DecodeStage::Failed;
            return res;
        }
        res.stage = higher ? DecodeStage::OsdW : DecodeStage::Osd0;
        return res;
    }

private:
    BitVector osd_impl(const BitVector& syndrome, std::span<const double> soft_values, std::size_t order,
                       std::span<const double> costs, bool* used_higher_order, bool* consistent) const {
        const std::size_t n = h_.cols();
        if (soft_values.size() != n) throw std::invalid_argument("soft value count != columns");
        if (syndrome.size() != h_.rows()) throw std::invalid_argument("syndrome length != rows");
        if (!costs.empty() && costs.size() != n) throw std::invalid_argument("cost count != columns");

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::stable_sort(perm.begin(), perm.end(),
                         [&](std::size_t a, std::size_t b) { return soft_values[a] < soft_values[b]; });
        const BinaryMatrix permuted = h_.permute_columns(perm);
        const Echelon e = row_reduce(permuted.row_data(), n, syndrome);
        const std::size_t r = e.rank();
        for (std::size_t i = r; i < h_.rows(); ++i) {
            if (e.rhs.get(i)) *consistent = false;
        }

        std::vector<double> cost(n, 1.0);
        if (!costs.empty()) cost.assign(costs.begin(), costs.end());

        std::vector<bool> is_pivot(n, false);
        for (auto c : e.pivot_cols) is_pivot[c] = true;
        std::vector<std::size_t> free_cols;
        for (std::size_t j = 0; j < n && free_cols.size() < cfg_.osd_span; ++j) {
            if (!is_pivot[j]) free_cols.push_back(j);
        }
        // Column j of the reduced matrix over the pivot rows.
        std::vector<BitVector> free_effect;
        free_effect.reserve(free_cols.size());
        for (auto j : free_cols) {
            BitVector col(r);
            for (std::size_t i = 0; i < r; ++i) {
                if (e.rows[i].get(j)) col.set(i);
            }
            free_effect.push_back(std::move(col));
        }
        BitVector base(r);
        for (std::size_t i = 0; i < r; ++i) base.set(i, e.rhs.get(i));

        auto pivot_cost = [&](const BitVector& pv) {
            double c = 0.0;
            for (auto i : pv.support()) c += cost[perm[e.pivot_cols[i]]];
            return c;
        };

        double best_cost = pivot_cost(base);
        BitVector best_pivots = base;
        std::vector<std::size_t> best_flips;
        const double tol = 1e-9;

        std::vector<std::size_t> pick;
        const std::size_t max_w = std::min(order, free_cols.size());
        for (std::size_t w = 1; w <= max_w; ++w) {
            pick.assign(w, 0);
            std::iota(pick.begin(), pick.end(), std::size_t{0});
            while (true) {
                BitVector pv = base;
                double c = 0.0;
                for (auto idx : pick) {
                    pv ^= free_effect[idx];
                    c += cost[perm[free_cols[idx]]];
                }
                c += pivot_cost(pv);
                if (c < best_cost - tol * std::max(1.0, std::fabs(best_cost))) {
                    best_cost = c;
                    best_pivots = std::move(pv);
                    best_flips.clear();
                    for (auto idx : pick) best_flips.push_back(free_cols[idx]);
                }
                // next combination in lexicographic order
                std::size_t i = w;
                while (i > 0 && pick[i - 1] == free_cols.size() - w + (i - 1)) --i;
                if (i == 0) break;
                ++pick[i - 1];
                for (std::size_t j = i; j < w; ++j) pick[j] = pick[j - 1] + 1;
            }
        }

        BitVector x(n);
        for (auto i : best_pivots.support()) x.set(perm[e.pivot_cols[i]]);
        for (auto j : best_flips) x.set(perm[j]);
        if (used_higher_order) *used_higher_order = !best_flips.empty();
        return x;
    }

    void validate_inputs(const BitVector& syndrome, std::span<const double> priors) const {
        if (syndrome.size() != h_.rows()) {
            throw std::invalid_argument("syndrome length " + std::to_string(syndrome.size()) + " != check count " +
                                        std::to_string(h_.rows()));
        }
        if (priors.size() != h_.cols()) {
            throw std::invalid_argument("prior count " + std::to_string(priors.size()) + " != bit count " +
                                        std::to_string(h_.cols()));
        }
        for (std::size_t v = 0; v < priors.size(); ++v) {
            if (!(priors[v] > 0.0 && priors[v] < 1.0)) {
                throw std::invalid_argument("prior for bit " + std::to_string(v) + " must lie strictly in (0, 1)");
            }
        }
    }

    // Extrinsic combination over a check's edges with forward/backward partial sums.
    void update_check(std::size_t c, bool syndrome_bit, const std::vector<double>& to_check, std::vector<double>& to_var,
                      std::vector<double>& fwd, std::vector<double>& bwd) const {
        const auto& edges = check_edges_[c];
        const std::size_t d = edges.size();
        if (d == 0) return;
        const double flip = syndrome_bit ? -1.0 : 1.0;
        if (d == 1) {
            // A degree-one check pins its bit to the syndrome.
            to_var[edges[0]] = flip * 1e3;
            return;
        }
        const bool product_sum = cfg_.variant == BpVariant::ProductSum;
        auto combine = [&](double a, double b) { return product_sum ? detail::boxplus(a, b) : detail::minsum(a, b); };
        fwd.resize(d);
        bwd.resize(d);
        fwd[0] = to_check[edges[0]];
        bwd[d - 1] = to_check[edges[d - 1]];
        for (std::size_t j = 1; j < d; ++j) {
            fwd[j] = combine(fwd[j - 1], to_check[edges[j]]);
            bwd[d - 1 - j] = combine(bwd[d - j], to_check[edges[d - 1 - j]]);
        }
        const double scale = product_sum ? 1.0 : cfg_.min_sum_scale;
        for (std::size_t j = 0; j < d; ++j) {
            double m;
            if (j == 0) {
                m = bwd[1];
            } else if (j == d - 1) {
                m = fwd[d - 2];
            } else {
                m = combine(fwd[j - 1], bwd[j + 1]);
            }
            to_var[edges[j]] = flip * scale * m;
        }
    }

    BinaryMatrix h_;
    SparseMatrix graph_;
    BpConfig cfg_;
    std::vector<std::size_t> edge_var_;
    std::vector<std::vector<std::size_t>> check_edges_;
    std::vector<std::vector<std::size_t>> var_edges_;
};

inline DecodeResult bp_decode(const BinaryMatrix& h, const BitVector& syndrome, std::span<const double> priors,
                              const BpConfig& cfg = {}) {
    return BpOsdDecoder(h, cfg).bp_decode(syndrome, priors);
}

inline std::optional<BitVector> osd_postprocess(const BinaryMatrix& h, const BitVector& syndrome,
                                                std::span<const double> soft_values, std::size_t order,
                                                std::size_t span = BpConfig{}.osd_span) {
    BpConfig cfg;
    cfg.osd_span = span;
    return BpOsdDecoder(h, cfg).osd(syndrome, soft_values, order);
}

inline DecodeResult bp_osd(const BinaryMatrix& h, const BitVector& syndrome, std::span<const double> priors,
                           const BpConfig& cfg = {}) {
    return BpOsdDecoder(h, cfg).decode(syndrome, priors);
}

}  // namespace lhp4d
