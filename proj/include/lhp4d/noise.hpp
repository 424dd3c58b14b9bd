#pragma once

// Biased Pauli data noise and syndrome-bit flips. Bias tailoring is modelled
// as an exchange of X and Z rates on the Hadamard-rotated qubit sector.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "gf2.hpp"

namespace lhp4d {

struct ChannelSpec {
    double p = 0.0;
    double beta_x = 1.0;
    double beta_y = 1.0;
    double beta_z = 1.0;
    double q = 0.0;
    // Columns at or past this index are Hadamard-rotated.
    std::optional<std::size_t> sector_swap_boundary;

    // Sets beta = (1, 0, eta), so that eta = p_Z / p_X.
    static ChannelSpec from_eta(double p, double eta, double q = 0.0) {
        ChannelSpec s;
        s.p = p;
        s.beta_x = 1.0;
        s.beta_y = 0.0;
        s.beta_z = eta;
        s.q = q;
        return s;
    }

    double beta() const { return beta_x + beta_y + beta_z; }
    // p_Z / p_X; infinite when beta_x is zero.
    double eta() const { return beta_z / beta_x; }

    void validate() const {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
        if (!(beta_x >= 0.0 && beta_y >= 0.0 && beta_z >= 0.0)) throw std::invalid_argument("bias weights must be >= 0");
        if (!(beta() > 0.0)) throw std::invalid_argument("bias weights must not all be zero");
    }
};

struct PauliProbs {
    double px = 0.0;
    double py = 0.0;
    double pz = 0.0;
};

inline PauliProbs channel_probs(const ChannelSpec& spec) {
    spec.validate();
    const double b = spec.beta();
    PauliProbs r{spec.p * spec.beta_x / b, spec.p * spec.beta_y / b, spec.p * spec.beta_z / b};
    return r;
}

struct PauliError {
    BitVector ex;
    BitVector ez;

    PauliError() = default;
    explicit PauliError(std::size_t n) : ex(n), ez(n) {}
    std::size_t size() const { return ex.size(); }
    bool operator==(const PauliError&) const = default;
};

// Exchanges X and Z components on columns [boundary, n).
inline PauliError swap_sector(const PauliError& e, std::size_t boundary) {
    PauliError r = e;
    for (std::size_t i = boundary; i < e.size(); ++i) {
        r.ex.set(i, e.ez.get(i));
        r.ez.set(i, e.ex.get(i));
    }
    return r;
}

// Per-trial random stream: a 64-bit Mersenne Twister seeded from
// (master seed, stream id). Uniform doubles are built from the top 53 bits so
// the sequence is identical on every platform.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double prob) { return uniform() < prob; }

private:
    std::mt19937_64 engine_;
};

// One uniform draw per qubit decides I, X, Y or Z. The swapped sector reuses
// the draw and exchanges the components, so swapping before or after sampling
// gives bit-identical results.
inline PauliError sample_pauli_error(const ChannelSpec& spec, std::size_t n, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("qubit count must be >= 1");
    const PauliProbs pr = channel_probs(spec);
    const double t_x = pr.px;
    const double t_y = pr.px + pr.py;
    const std::size_t boundary = spec.sector_swap_boundary.value_or(n);
    PauliError e(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        bool x = false;
        bool z = false;
        if (u < t_x) {
            x = true;
        } else if (u < t_y) {
            x = z = true;
        } else if (u < spec.p) {
            z = true;
        }
        if (i >= boundary) std::swap(x, z);
        if (x) e.ex.set(i);
        if (z) e.ez.set(i);
    }
    return e;
}

inline BitVector sample_measurement_error(double q, std::size_t m_bits, RngStream& rng) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
    BitVector u(m_bits);
    for (std::size_t i = 0; i < m_bits; ++i) {
        if (rng.uniform() < q) u.set(i);
    }
    return u;
}

}  // namespace lhp4d
