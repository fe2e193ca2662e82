#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "secrecy/channel.hpp"
#include "secrecy/policy.hpp"
#include "secrecy/rng.hpp"

namespace secrecy {

using Sequence = std::vector<std::uint8_t>;

/// Block-Markov simulation parameters. All n*rate products must be integral
/// so bin counts are exact powers of two, and the keyed part must fit inside
/// the key budget (r1u <= r2k).
struct SimConfig {
    int n = 4;
    int b = 3;
    double r1u = 0.0, r1s = 0.0, r1x = 0.0;  // user 1: keyed, binned, randomization
    double r2 = 0.0, r2k = 0.0, r2x = 0.0;   // user 2: public, key, randomization
    InputPolicy policy = InputPolicy::iid_binary(0.5, 0.5);
    double epsilon = 0.1;
    std::uint64_t seed = 1;
    int trials = 2000;
    int cap_exponent = 24;       // enumeration cap = 2^cap_exponent
    int leakage_draws = 100;     // codebook draws averaged into the leakage numbers
    int equivocation_draws = 8;  // codebook draws averaged into the equivocation check

    void validate(const TwoWayChannel& ch) const;

    std::uint64_t count(double rate) const;  // 2^{n*rate}
    std::uint64_t cap() const { return 1ULL << cap_exponent; }
    double rbar1() const { return r1u + r1s + r1x; }
    double rbar2() const { return r2 + r2k + r2x; }
};

/// Random binning codebooks for both users. c1 is organized as bins indexed
/// by the keyed message, sub-bins by the secret message, residual by the
/// randomization index; c2 analogously as (public message, key, residual).
struct CodebookPair {
    int n = 0;
    std::uint64_t n1u = 1, n1s = 1, n1x = 1;
    std::uint64_t n2m = 1, n2k = 1, n2x = 1;
    Sequence c1, c2;  // flat, stride n
    std::uint64_t seed_material = 0;

    std::uint64_t size1() const { return n1u * n1s * n1x; }
    std::uint64_t size2() const { return n2m * n2k * n2x; }
    const std::uint8_t* u1(std::uint64_t l) const { return c1.data() + l * n; }
    const std::uint8_t* u2(std::uint64_t l) const { return c2.data() + l * n; }
    std::uint64_t idx1(std::uint64_t m1u, std::uint64_t m1s, std::uint64_t m1x) const {
        return (m1u * n1s + m1s) * n1x + m1x;
    }
    std::uint64_t idx2(std::uint64_t m2, std::uint64_t k2, std::uint64_t m2x) const {
        return (m2 * n2k + k2) * n2x + m2x;
    }
    void split1(std::uint64_t l, std::uint64_t& m1u, std::uint64_t& m1s) const {
        m1s = (l / n1x) % n1s;
        m1u = l / (n1x * n1s);
    }
    void split2(std::uint64_t l, std::uint64_t& m2, std::uint64_t& k2) const {
        k2 = (l / n2x) % n2k;
        m2 = l / (n2x * n2k);
    }
};

struct SimReport {
    double pe1 = 0.0;  // user 1 failing to decode the public message
    double pe2 = 0.0;  // user 2 failing to decode the confidential message
    double leakage_onesided = 0.0;  // (1/n) I(secret messages over blocks 2..b ; Z^b | codebooks)
    double leakage_joint = 0.0;     // (1/n) I(M1, M2 ; Z) for a single block
    bool leakage_estimated = false;
    double equivocation_lhs = 0.0;
    double equivocation_rhs = 0.0;
    bool equivocation_holds = false;
    std::string equivocation_status;  // "ok", "precondition_unmet" or "cap_exceeded"
    int trials = 0;
    std::uint64_t seed = 0;
};

struct EquivocationBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Precomputed design tables shared by the per-block operations.
class SimContext {
  public:
    SimContext(TwoWayChannel ch, SimConfig cfg);

    const TwoWayChannel& channel() const { return ch_; }
    const SimConfig& config() const { return cfg_; }

    /// Draw both codebooks i.i.d. from the policy u-marginals; deterministic
    /// in seed_material. Throws CapacityOverflow past the enumeration cap.
    CodebookPair build_codebooks(std::uint64_t seed_material) const;

    /// Block encoder. For j >= 2 the keyed message index is shifted by
    /// k2_prev modulo the bin count before codeword selection; block 1 sends
    /// a fixed all-zeros input at user 1. Residual indices are drawn from rng.
    std::pair<Sequence, Sequence> encode_block(const CodebookPair& cb, int j, std::uint64_t m1u,
                                               std::uint64_t m1s, std::uint64_t m2,
                                               std::uint64_t k2_curr, std::uint64_t k2_prev,
                                               Rng& rng) const;

    /// Decodes (m1u, m1s) at user 2 by unique robust typicality against the
    /// design joint of (U1, X2, Y2), then removes the key. Failure is a value.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> decode_user2(
        const CodebookPair& cb, const Sequence& y2, const Sequence& x2, std::uint64_t k2_prev,
        double epsilon) const;

    /// Decodes (m2, k2) at user 1 against the design joint of (U2, X1, Y1).
    std::optional<std::pair<std::uint64_t, std::uint64_t>> decode_user1(const CodebookPair& cb,
                                                                        const Sequence& y1,
                                                                        const Sequence& x1,
                                                                        double epsilon) const;

    /// Block-1 variant: user 1 sent the fixed all-zeros input, so candidates
    /// are tested against the design joint of (U2, Y1) given that input.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> decode_user1_silent(
        const CodebookPair& cb, const Sequence& y1, double epsilon) const;

    /// Exact one-sided leakage (1/n) I(secrets_2^b ; Z^b) for a drawn codebook
    /// pair. One-time pads are independent uniforms, so the keyed message part
    /// contributes exactly zero and only the binned part is enumerated.
    double exact_leakage(const CodebookPair& cb) const;

    /// Plug-in Monte Carlo estimate of the same functional.
    double estimate_leakage(const CodebookPair& cb, Rng& rng, int samples) const;

    /// Single-block joint-secrecy leakage (1/n) I(M1, M2 ; Z).
    double exact_joint_leakage(const CodebookPair& cb) const;
    double estimate_joint_leakage(const CodebookPair& cb, Rng& rng, int samples) const;

    /// Index-equivocation bound check for one block with uniform indices.
    EquivocationBound equivocation_bound_check(const CodebookPair& cb) const;

    double i_u12_z() const { return i_u12_z_; }
    double i_u1_z() const { return i_u1_z_; }
    double i_u2_z() const { return i_u2_z_; }

  private:
    bool type_check(const std::vector<int>& counts, const std::vector<double>& design,
                    double epsilon) const;
    Sequence sample_prefix(const std::vector<std::vector<double>>& rows, const Sequence& u,
                           Rng& rng) const;

    struct EnumBlock {
        std::uint64_t radix = 1;
        bool user1_silent = false;
    };
    double enumerate_mi(const CodebookPair& cb, const std::vector<EnumBlock>& blocks,
                        std::uint64_t msg_space,
                        std::uint64_t (*msg_of)(const CodebookPair&,
                                                const std::vector<std::uint64_t>&)) const;
    double sampled_mi(const CodebookPair& cb, const std::vector<EnumBlock>& blocks,
                      std::uint64_t msg_space,
                      std::uint64_t (*msg_of)(const CodebookPair&,
                                              const std::vector<std::uint64_t>&),
                      Rng& rng, int samples) const;

    TwoWayChannel ch_;
    SimConfig cfg_;
    std::vector<double> pu1_, pu2_;
    std::vector<double> d2_;    // design p(u1, x2, y2)
    std::vector<double> d1_;    // design p(u2, x1, y1)
    std::vector<double> d1b1_;  // block-1 design p(u2, y1 | x1 = zeros)
    double i_u12_z_ = 0.0, i_u1_z_ = 0.0, i_u2_z_ = 0.0;
    // per-symbol z kernels with prefixes folded in
    std::vector<double> kz_;   // (u1, u2) -> z distribution
    std::vector<double> k1z_;  // u2 -> z distribution when user 1 sends the fixed zero symbol
    bool all_deterministic_ = false;
    std::vector<std::uint8_t> det_z_;   // (u1, u2) -> z when deterministic
    std::vector<std::uint8_t> det_z1_;  // u2 -> z in the silent block when deterministic
};

/// Memoryless transmission: per-symbol sampling from p(y1,y2,z | x1,x2).
std::tuple<Sequence, Sequence, Sequence> transmit(const TwoWayChannel& ch, const Sequence& x1,
                                                  const Sequence& x2, Rng& rng);

/// Runs the full block-Markov experiment: per-trial codebooks, b blocks with
/// key chaining through user 1's decoded keys, error aggregation, leakage and
/// equivocation fields. Deterministic in cfg.seed.
SimReport run_experiment(const TwoWayChannel& ch, const SimConfig& cfg);

nlohmann::json report_to_json(const SimReport& rep, const SimConfig& cfg,
                              const std::string& channel_name);

}  // namespace secrecy
