#include "secrecy/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "secrecy/errors.hpp"
#include "secrecy/parallel.hpp"
#include "secrecy/pmf.hpp"

namespace secrecy {

namespace {

constexpr double kTinyNeg = 1e-12;

double clamp_leak(double v) { return (v < 0.0 && v > -kTinyNeg) ? 0.0 : v; }

std::uint64_t checked_pow2(double v, const char* what) {
    const long long k = std::llround(v);
    if (std::abs(v - static_cast<double>(k)) > 1e-9 || k < 0)
        throw ValidationError(std::string("sim: n*") + what + " must be a non-negative integer");
    if (k > 62) throw CapacityOverflow(std::string("sim: 2^(n*") + what + ") overflows");
    return 1ULL << k;
}

int z_bits(int z_size) {
    return std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(z_size - 1))));
}

// seed streams
constexpr std::uint64_t kStreamCodebook = 1;
constexpr std::uint64_t kStreamTrial = 2;
constexpr std::uint64_t kStreamLeak = 3;
constexpr std::uint64_t kStreamJoint = 4;

// message extractors for the exact/sampled enumerations
std::uint64_t msg_secrets(const CodebookPair& cb, const std::vector<std::uint64_t>& digs) {
    // digs[0] is the silent block; later digits are l1 + size1 * l2
    std::uint64_t msg = 0;
    for (std::size_t j = 1; j < digs.size(); ++j) {
        const std::uint64_t l1 = digs[j] % cb.size1();
        msg = msg * cb.n1s + (l1 / cb.n1x) % cb.n1s;
    }
    return msg;
}

std::uint64_t msg_joint_block(const CodebookPair& cb, const std::vector<std::uint64_t>& digs) {
    const std::uint64_t l1 = digs[0] % cb.size1();
    const std::uint64_t l2 = digs[0] / cb.size1();
    const std::uint64_t m1s = (l1 / cb.n1x) % cb.n1s;
    const std::uint64_t m2 = l2 / (cb.n2k * cb.n2x);
    return m1s * cb.n2m + m2;
}

std::uint64_t msg_pair(const CodebookPair& cb, const std::vector<std::uint64_t>& digs) {
    (void)cb;
    return digs[0];
}

// Accumulates p(z-sequence, message); message is uniform by construction.
struct ZJoint {
    std::unordered_map<std::uint64_t, std::vector<double>> cells;
    std::uint64_t msg_space = 1;

    void add(std::uint64_t zkey, std::uint64_t msg, double p) {
        auto it = cells.find(zkey);
        if (it == cells.end()) {
            if ((cells.size() + 1) * msg_space > (1ULL << 26))
                throw CapExceeded("sim: exact posterior table exceeds the memory guard");
            it = cells.emplace(zkey, std::vector<double>(msg_space, 0.0)).first;
        }
        it->second[msg] += p;
    }

    // H(M) - H(M|Z) in bits
    double mutual_info_bits() const {
        double h_cond = 0.0;
        for (const auto& cell : cells) {
            double pz = 0.0;
            for (double q : cell.second) pz += q;
            if (pz <= 0.0) continue;
            for (double q : cell.second)
                if (q > 0.0) h_cond += q * std::log2(pz / q);
        }
        return clamp_leak(std::log2(static_cast<double>(msg_space)) - h_cond);
    }
};

}  // namespace

std::uint64_t SimConfig::count(double rate) const { return checked_pow2(n * rate, "rate"); }

void SimConfig::validate(const TwoWayChannel& ch) const {
    if (n < 1) throw ValidationError("sim: n must be >= 1");
    if (b < 2) throw ValidationError("sim: b must be >= 2");
    if (trials < 1) throw ValidationError("sim: trials must be >= 1");
    if (!(epsilon >= 0.0)) throw ValidationError("sim: epsilon must be >= 0");
    if (cap_exponent < 1 || cap_exponent > 62)
        throw ValidationError("sim: cap exponent out of range");
    for (double r : {r1u, r1s, r1x, r2, r2k, r2x}) {
        if (!(r >= 0.0)) throw ValidationError("sim: rates must be >= 0");
        checked_pow2(n * r, "rate");
    }
    if (r1u > r2k + 1e-12)
        throw ValidationError("sim: keyed rate must not exceed key rate (r1u <= r2k)");
    policy.validate();
    if (policy.q_card() != 1) throw ValidationError("sim: simulation runs with |Q| = 1");
    if (policy.x1_card() != ch.x1_size || policy.x2_card() != ch.x2_size)
        throw DimensionMismatch("sim: policy does not match channel input alphabets");
}

SimContext::SimContext(TwoWayChannel ch, SimConfig cfg) : ch_(std::move(ch)), cfg_(std::move(cfg)) {
    ch_.validate();
    cfg_.validate(ch_);
    const Pmf joint = joint_from_policy(ch_, cfg_.policy);
    pu1_ = cfg_.policy.u1_marginal();
    pu2_ = cfg_.policy.u2_marginal();
    d2_ = joint.marginal({"U1", "X2", "Y2"}).table();
    d1_ = joint.marginal({"U2", "X1", "Y1"}).table();
    i_u12_z_ = joint.mutual_info({"U1", "U2"}, {"Z"});
    i_u1_z_ = joint.mutual_info({"U1"}, {"Z"});
    i_u2_z_ = joint.mutual_info({"U2"}, {"Z"});

    const int U1 = cfg_.policy.u1_card(), U2 = cfg_.policy.u2_card();
    const int X1 = ch_.x1_size, X2 = ch_.x2_size, Z = ch_.z_size;
    std::vector<double> pzx(static_cast<std::size_t>(X1) * X2 * Z, 0.0);
    for (int x1 = 0; x1 < X1; ++x1)
        for (int x2 = 0; x2 < X2; ++x2)
            for (int y1 = 0; y1 < ch_.y1_size; ++y1)
                for (int y2 = 0; y2 < ch_.y2_size; ++y2)
                    for (int z = 0; z < Z; ++z)
                        pzx[(static_cast<std::size_t>(x1) * X2 + x2) * Z + z] +=
                            ch_.p(x1, x2, y1, y2, z);
    kz_.assign(static_cast<std::size_t>(U1) * U2 * Z, 0.0);
    for (int u1 = 0; u1 < U1; ++u1)
        for (int u2 = 0; u2 < U2; ++u2)
            for (int x1 = 0; x1 < X1; ++x1) {
                const double p1 = cfg_.policy.x1_given_u1[u1][x1];
                if (p1 == 0.0) continue;
                for (int x2 = 0; x2 < X2; ++x2) {
                    const double p12 = p1 * cfg_.policy.x2_given_u2[u2][x2];
                    if (p12 == 0.0) continue;
                    for (int z = 0; z < Z; ++z)
                        kz_[(static_cast<std::size_t>(u1) * U2 + u2) * Z + z] +=
                            p12 * pzx[(static_cast<std::size_t>(x1) * X2 + x2) * Z + z];
                }
            }
    k1z_.assign(static_cast<std::size_t>(U2) * Z, 0.0);
    for (int u2 = 0; u2 < U2; ++u2)
        for (int x2 = 0; x2 < X2; ++x2) {
            const double p2 = cfg_.policy.x2_given_u2[u2][x2];
            if (p2 == 0.0) continue;
            for (int z = 0; z < Z; ++z)
                k1z_[static_cast<std::size_t>(u2) * Z + z] += p2 * pzx[static_cast<std::size_t>(x2) * Z + z];
        }
    // block-1 design p(u2, y1) with user 1 pinned to the zero input
    const int Y1 = ch_.y1_size;
    d1b1_.assign(static_cast<std::size_t>(U2) * Y1, 0.0);
    for (int u2 = 0; u2 < U2; ++u2)
        for (int x2 = 0; x2 < X2; ++x2) {
            const double p2 = pu2_[u2] * cfg_.policy.x2_given_u2[u2][x2];
            if (p2 == 0.0) continue;
            for (int y1 = 0; y1 < Y1; ++y1)
                for (int y2 = 0; y2 < ch_.y2_size; ++y2)
                    for (int z = 0; z < Z; ++z)
                        d1b1_[static_cast<std::size_t>(u2) * Y1 + y1] +=
                            p2 * ch_.p(0, x2, y1, y2, z);
        }
    all_deterministic_ = ch_.deterministic() && cfg_.policy.deterministic_prefixes();
    if (all_deterministic_) {
        det_z_.assign(static_cast<std::size_t>(U1) * U2, 0);
        det_z1_.assign(static_cast<std::size_t>(U2), 0);
        for (int u1 = 0; u1 < U1; ++u1)
            for (int u2 = 0; u2 < U2; ++u2)
                for (int z = 0; z < Z; ++z)
                    if (kz_[(static_cast<std::size_t>(u1) * U2 + u2) * Z + z] == 1.0)
                        det_z_[static_cast<std::size_t>(u1) * U2 + u2] =
                            static_cast<std::uint8_t>(z);
        for (int u2 = 0; u2 < U2; ++u2)
            for (int z = 0; z < Z; ++z)
                if (k1z_[static_cast<std::size_t>(u2) * Z + z] == 1.0)
                    det_z1_[u2] = static_cast<std::uint8_t>(z);
    }
}

CodebookPair SimContext::build_codebooks(std::uint64_t seed_material) const {
    CodebookPair cb;
    cb.n = cfg_.n;
    cb.seed_material = seed_material;
    cb.n1u = cfg_.count(cfg_.r1u);
    cb.n1s = cfg_.count(cfg_.r1s);
    cb.n1x = cfg_.count(cfg_.r1x);
    cb.n2m = cfg_.count(cfg_.r2);
    cb.n2k = cfg_.count(cfg_.r2k);
    cb.n2x = cfg_.count(cfg_.r2x);
    if (cb.size1() > cfg_.cap() || cb.size2() > cfg_.cap())
        throw CapacityOverflow("sim: codebook size exceeds the enumeration cap");
    Rng rng(seed_material);
    cb.c1.resize(cb.size1() * cfg_.n);
    for (auto& s : cb.c1) s = static_cast<std::uint8_t>(rng.categorical(pu1_));
    cb.c2.resize(cb.size2() * cfg_.n);
    for (auto& s : cb.c2) s = static_cast<std::uint8_t>(rng.categorical(pu2_));
    return cb;
}

Sequence SimContext::sample_prefix(const std::vector<std::vector<double>>& rows, const Sequence& u,
                                   Rng& rng) const {
    Sequence x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        x[i] = static_cast<std::uint8_t>(rng.categorical(rows[u[i]]));
    return x;
}

std::pair<Sequence, Sequence> SimContext::encode_block(const CodebookPair& cb, int j,
                                                       std::uint64_t m1u, std::uint64_t m1s,
                                                       std::uint64_t m2, std::uint64_t k2_curr,
                                                       std::uint64_t k2_prev, Rng& rng) const {
    if (m1u >= cb.n1u || m1s >= cb.n1s || m2 >= cb.n2m || k2_curr >= cb.n2k)
        throw IndexOutOfRange("encode_block: message index out of range");
    Sequence x1;
    if (j <= 1) {
        // user 1 sends no message in block 1; a fixed all-zeros input enters the channel
        x1.assign(cb.n, 0);
    } else {
        const std::uint64_t m1u_enc = (m1u + k2_prev) % cb.n1u;
        const std::uint64_t l1 = cb.idx1(m1u_enc, m1s, rng.below(cb.n1x));
        Sequence u1(cb.u1(l1), cb.u1(l1) + cb.n);
        x1 = sample_prefix(cfg_.policy.x1_given_u1, u1, rng);
    }
    const std::uint64_t l2 = cb.idx2(m2, k2_curr, rng.below(cb.n2x));
    Sequence u2(cb.u2(l2), cb.u2(l2) + cb.n);
    Sequence x2 = sample_prefix(cfg_.policy.x2_given_u2, u2, rng);
    return {std::move(x1), std::move(x2)};
}

std::tuple<Sequence, Sequence, Sequence> transmit(const TwoWayChannel& ch, const Sequence& x1,
                                                  const Sequence& x2, Rng& rng) {
    if (x1.size() != x2.size()) throw DimensionMismatch("transmit: input length mismatch");
    Sequence y1(x1.size()), y2(x1.size()), z(x1.size());
    const std::size_t out = ch.out_size();
    for (std::size_t i = 0; i < x1.size(); ++i) {
        if (x1[i] >= ch.x1_size || x2[i] >= ch.x2_size)
            throw IndexOutOfRange("transmit: symbol out of range");
        const double* row = ch.transitions.data() + ch.idx(x1[i], x2[i], 0, 0, 0);
        const int k = rng.categorical(std::span<const double>(row, out));
        z[i] = static_cast<std::uint8_t>(k % ch.z_size);
        const int k2 = k / ch.z_size;
        y2[i] = static_cast<std::uint8_t>(k2 % ch.y2_size);
        y1[i] = static_cast<std::uint8_t>(k2 / ch.y2_size);
    }
    return {std::move(y1), std::move(y2), std::move(z)};
}

bool SimContext::type_check(const std::vector<int>& counts, const std::vector<double>& design,
                            double epsilon) const {
    const int n = cfg_.n;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const double p = design[c];
        // robust typicality; the sampling-width term keeps desk-scale n usable
        // and vanishes relative to eps*p as n grows
        double tol = epsilon * std::max(p, 1.0 / n);
        if (epsilon > 0.0) tol += 2.0 * std::sqrt(p * (1.0 - p) / n);
        if (std::abs(static_cast<double>(counts[c]) / n - p) > tol + 1e-12) return false;
    }
    return true;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> SimContext::decode_user2(
    const CodebookPair& cb, const Sequence& y2, const Sequence& x2, std::uint64_t k2_prev,
    double epsilon) const {
    const int ac = ch_.x2_size, bc = ch_.y2_size;
    std::vector<int> counts(d2_.size());
    std::optional<std::uint64_t> hit;
    for (std::uint64_t l = 0; l < cb.size1(); ++l) {
        const std::uint8_t* u = cb.u1(l);
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < cfg_.n; ++i)
            ++counts[(static_cast<std::size_t>(u[i]) * ac + x2[i]) * bc + y2[i]];
        if (type_check(counts, d2_, epsilon)) {
            if (hit) return std::nullopt;  // ambiguous
            hit = l;
        }
    }
    if (!hit) return std::nullopt;
    std::uint64_t m1u_enc, m1s;
    cb.split1(*hit, m1u_enc, m1s);
    const std::uint64_t pad = k2_prev % cb.n1u;
    return std::make_pair((m1u_enc + cb.n1u - pad) % cb.n1u, m1s);
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> SimContext::decode_user1(
    const CodebookPair& cb, const Sequence& y1, const Sequence& x1, double epsilon) const {
    const int ac = ch_.x1_size, bc = ch_.y1_size;
    std::vector<int> counts(d1_.size());
    std::optional<std::uint64_t> hit;
    for (std::uint64_t l = 0; l < cb.size2(); ++l) {
        const std::uint8_t* u = cb.u2(l);
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < cfg_.n; ++i)
            ++counts[(static_cast<std::size_t>(u[i]) * ac + x1[i]) * bc + y1[i]];
        if (type_check(counts, d1_, epsilon)) {
            if (hit) return std::nullopt;
            hit = l;
        }
    }
    if (!hit) return std::nullopt;
    std::uint64_t m2, k2;
    cb.split2(*hit, m2, k2);
    return std::make_pair(m2, k2);
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> SimContext::decode_user1_silent(
    const CodebookPair& cb, const Sequence& y1, double epsilon) const {
    const int bc = ch_.y1_size;
    std::vector<int> counts(d1b1_.size());
    std::optional<std::uint64_t> hit;
    for (std::uint64_t l = 0; l < cb.size2(); ++l) {
        const std::uint8_t* u = cb.u2(l);
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < cfg_.n; ++i)
            ++counts[static_cast<std::size_t>(u[i]) * bc + y1[i]];
        if (type_check(counts, d1b1_, epsilon)) {
            if (hit) return std::nullopt;
            hit = l;
        }
    }
    if (!hit) return std::nullopt;
    std::uint64_t m2, k2;
    cb.split2(*hit, m2, k2);
    return std::make_pair(m2, k2);
}

double SimContext::enumerate_mi(const CodebookPair& cb, const std::vector<EnumBlock>& blocks,
                                std::uint64_t msg_space,
                                std::uint64_t (*msg_of)(const CodebookPair&,
                                                        const std::vector<std::uint64_t>&)) const {
    if (!ch_.deterministic())
        throw NondeterministicChannel("sim: exact enumeration requires a deterministic channel");
    const int n = cfg_.n, Z = ch_.z_size;
    const int nb = static_cast<int>(blocks.size());
    long double total_ld = 1.0L;
    for (const auto& blk : blocks) total_ld *= blk.radix;
    if (total_ld > static_cast<long double>(cfg_.cap()))
        throw CapExceeded("sim: index tuple count exceeds the cap; reduce n, b or rates");
    const std::uint64_t total = static_cast<std::uint64_t>(total_ld);
    if (msg_space > (1ULL << 22)) throw CapExceeded("sim: message space exceeds the cap");
    const int zb = z_bits(Z);
    if (n * nb * zb > 62) throw CapExceeded("sim: eavesdropper sequence too long to enumerate");
    const bool det = all_deterministic_;
    long double zs = 1.0L;
    for (int i = 0; i < n * nb && zs <= 1e18L; ++i) zs *= Z;
    if (!det && zs * total_ld > static_cast<long double>(1ULL << 28))
        throw CapExceeded("sim: stochastic-prefix enumeration exceeds the cap");
    // posterior table memory bound: distinct z sequences times message space
    const long double cells_bound = std::min<long double>(total_ld, zs);
    if (cells_bound * static_cast<long double>(msg_space) > static_cast<long double>(1ULL << 26))
        throw CapExceeded("sim: exact posterior table exceeds the memory guard");

    ZJoint joint;
    joint.msg_space = msg_space;
    const double w = 1.0 / static_cast<double>(total);
    const int U2 = cfg_.policy.u2_card();
    std::vector<std::uint64_t> digs(nb, 0);
    std::vector<const std::uint8_t*> u1s(nb), u2s(nb);
    const int slots = n * nb;
    std::vector<const double*> rows(det ? 0 : slots);
    std::vector<int> zi;
    std::vector<double> pp;

    for (std::uint64_t t = 0; t < total; ++t) {
        std::uint64_t rest = t;
        for (int j = 0; j < nb; ++j) {
            digs[j] = rest % blocks[j].radix;
            rest /= blocks[j].radix;
        }
        for (int j = 0; j < nb; ++j) {
            if (blocks[j].user1_silent) {
                // silent block: digit is l2 = idx2(0, k2, m2x), a contiguous range
                u1s[j] = nullptr;
                u2s[j] = cb.u2(digs[j]);
            } else {
                u1s[j] = cb.u1(digs[j] % cb.size1());
                u2s[j] = cb.u2(digs[j] / cb.size1());
            }
        }
        const std::uint64_t msg = msg_of(cb, digs);
        if (det) {
            std::uint64_t zkey = 0;
            for (int j = 0; j < nb; ++j)
                for (int i = 0; i < n; ++i) {
                    const std::uint8_t z =
                        u1s[j] ? det_z_[static_cast<std::size_t>(u1s[j][i]) * U2 + u2s[j][i]]
                               : det_z1_[u2s[j][i]];
                    zkey = (zkey << zb) | z;
                }
            joint.add(zkey, msg, w);
        } else {
            for (int j = 0; j < nb; ++j)
                for (int i = 0; i < n; ++i)
                    rows[static_cast<std::size_t>(j) * n + i] =
                        u1s[j] ? &kz_[(static_cast<std::size_t>(u1s[j][i]) * U2 + u2s[j][i]) * Z]
                               : &k1z_[static_cast<std::size_t>(u2s[j][i]) * Z];
            zi.assign(slots, 0);
            pp.assign(slots + 1, 0.0);
            pp[0] = w;
            int s = 0;
            while (true) {
                for (; s < slots; ++s) pp[s + 1] = pp[s] * rows[s][zi[s]];
                if (pp[slots] > 0.0) {
                    std::uint64_t zkey = 0;
                    for (int q = 0; q < slots; ++q) zkey = (zkey << zb) | zi[q];
                    joint.add(zkey, msg, pp[slots]);
                }
                s = slots - 1;
                while (s >= 0 && zi[s] == Z - 1) {
                    zi[s] = 0;
                    --s;
                }
                if (s < 0) break;
                ++zi[s];
            }
        }
    }
    return joint.mutual_info_bits();
}

double SimContext::sampled_mi(const CodebookPair& cb, const std::vector<EnumBlock>& blocks,
                              std::uint64_t msg_space,
                              std::uint64_t (*msg_of)(const CodebookPair&,
                                                      const std::vector<std::uint64_t>&),
                              Rng& rng, int samples) const {
    const int n = cfg_.n;
    const int nb = static_cast<int>(blocks.size());
    const int zb = z_bits(ch_.z_size);
    if (n * nb * zb > 62)
        throw CapExceeded("sim: eavesdropper sequence too long for the plug-in estimator");
    std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, std::uint32_t>> cells;
    std::unordered_map<std::uint64_t, std::uint32_t> zcount;
    std::vector<std::uint64_t> mcount(msg_space, 0);
    std::vector<std::uint64_t> digs(nb);
    for (int s = 0; s < samples; ++s) {
        for (int j = 0; j < nb; ++j) digs[j] = rng.below(blocks[j].radix);
        std::uint64_t zkey = 0;
        for (int j = 0; j < nb; ++j) {
            const std::uint8_t* u1 =
                blocks[j].user1_silent ? nullptr : cb.u1(digs[j] % cb.size1());
            const std::uint8_t* u2 = blocks[j].user1_silent
                                         ? cb.u2(digs[j])
                                         : cb.u2(digs[j] / cb.size1());
            for (int i = 0; i < n; ++i) {
                int x1 = 0;
                if (u1) x1 = rng.categorical(cfg_.policy.x1_given_u1[u1[i]]);
                const int x2 = rng.categorical(cfg_.policy.x2_given_u2[u2[i]]);
                const double* row = ch_.transitions.data() + ch_.idx(x1, x2, 0, 0, 0);
                const int k = rng.categorical(std::span<const double>(row, ch_.out_size()));
                zkey = (zkey << zb) | static_cast<std::uint64_t>(k % ch_.z_size);
            }
        }
        const std::uint64_t msg = msg_of(cb, digs);
        ++cells[zkey][msg];
        ++zcount[zkey];
        ++mcount[msg];
    }
    const double N = static_cast<double>(samples);
    double mi = 0.0;
    for (const auto& cell : cells) {
        const double cz = zcount[cell.first];
        for (const auto& [m, c] : cell.second)
            mi += (c / N) * std::log2(c * N / (cz * static_cast<double>(mcount[m])));
    }
    return std::max(0.0, mi);
}

double SimContext::exact_leakage(const CodebookPair& cb) const {
    std::vector<EnumBlock> blocks(cfg_.b);
    blocks[0] = {cb.n2k * cb.n2x, true};
    for (int j = 1; j < cfg_.b; ++j) blocks[j] = {cb.size1() * cb.size2(), false};
    std::uint64_t msz = 1;
    for (int j = 1; j < cfg_.b; ++j) {
        if (msz > (1ULL << 22) / std::max<std::uint64_t>(cb.n1s, 1))
            throw CapExceeded("sim: secret message space exceeds the cap");
        msz *= cb.n1s;
    }
    return enumerate_mi(cb, blocks, msz, &msg_secrets) / cfg_.n;
}

double SimContext::estimate_leakage(const CodebookPair& cb, Rng& rng, int samples) const {
    std::vector<EnumBlock> blocks(cfg_.b);
    blocks[0] = {cb.n2k * cb.n2x, true};
    for (int j = 1; j < cfg_.b; ++j) blocks[j] = {cb.size1() * cb.size2(), false};
    std::uint64_t msz = 1;
    for (int j = 1; j < cfg_.b; ++j) msz *= cb.n1s;
    if (msz > (1ULL << 22)) throw CapExceeded("sim: secret message space exceeds the cap");
    return sampled_mi(cb, blocks, msz, &msg_secrets, rng, samples) / cfg_.n;
}

double SimContext::exact_joint_leakage(const CodebookPair& cb) const {
    std::vector<EnumBlock> blocks = {{cb.size1() * cb.size2(), false}};
    return enumerate_mi(cb, blocks, cb.n1s * cb.n2m, &msg_joint_block) / cfg_.n;
}

double SimContext::estimate_joint_leakage(const CodebookPair& cb, Rng& rng, int samples) const {
    std::vector<EnumBlock> blocks = {{cb.size1() * cb.size2(), false}};
    if (cb.n1s * cb.n2m > (1ULL << 22))
        throw CapExceeded("sim: message space exceeds the cap");
    return sampled_mi(cb, blocks, cb.n1s * cb.n2m, &msg_joint_block, rng, samples) / cfg_.n;
}

EquivocationBound SimContext::equivocation_bound_check(const CodebookPair& cb) const {
    const double rb1 = cfg_.rbar1(), rb2 = cfg_.rbar2();
    const double tol = 1e-9;
    if (rb1 + rb2 < i_u12_z_ - tol || rb1 < i_u1_z_ - tol || rb2 < i_u2_z_ - tol)
        throw PreconditionUnmet(
            "equivocation bound: rate pair violates the hypotheses (needs R1+R2 >= I(U1U2;Z), "
            "R1 >= I(U1;Z), R2 >= I(U2;Z))");
    // one block, both users transmitting uniformly chosen codewords
    std::vector<EnumBlock> blocks = {{cb.size1() * cb.size2(), false}};
    const std::uint64_t pairs = cb.size1() * cb.size2();
    if (pairs > (1ULL << 22)) throw CapExceeded("equivocation bound: codeword pair space exceeds the cap");
    const double mi = enumerate_mi(cb, blocks, pairs, &msg_pair);
    EquivocationBound r;
    // H(L1 L2 | codebooks, Z) = H(L1 L2) - I(L1 L2 ; Z | codebooks)
    r.lhs = std::log2(static_cast<double>(pairs)) - mi;
    const double delta = 4.0 * cfg_.epsilon *
                             std::log2(static_cast<double>(cfg_.policy.u1_card()) *
                                       cfg_.policy.u2_card() * ch_.z_size) +
                         2.0 / cfg_.n;
    r.rhs = cfg_.n * (rb1 + rb2 - i_u12_z_ + delta);
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

SimReport run_experiment(const TwoWayChannel& ch, const SimConfig& cfg) {
    const SimContext ctx(ch, cfg);
    const int blocks_counted = cfg.b - 1;

    struct TrialOut {
        std::uint32_t err1 = 0, err2 = 0;
    };
    std::vector<TrialOut> results(cfg.trials);
    parallel_chunks(static_cast<std::uint64_t>(cfg.trials),
                    [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            const CodebookPair cb =
                ctx.build_codebooks(derive_seed(cfg.seed, kStreamCodebook, t));
            Rng rng(derive_seed(cfg.seed, kStreamTrial, t));
            TrialOut out;
            std::uint64_t k2_prev_true = 0;  // user 2's own key from the previous block
            std::uint64_t k2_prev_hat = 0;   // user 1's decoded copy
            for (int j = 1; j <= cfg.b; ++j) {
                const std::uint64_t m1u = j >= 2 ? rng.below(cb.n1u) : 0;
                const std::uint64_t m1s = j >= 2 ? rng.below(cb.n1s) : 0;
                const std::uint64_t m2 = j >= 2 ? rng.below(cb.n2m) : 0;
                const std::uint64_t k2 = rng.below(cb.n2k);
                auto [x1, x2] = ctx.encode_block(cb, j, m1u, m1s, m2, k2, k2_prev_hat, rng);
                auto [y1, y2, z] = transmit(ctx.channel(), x1, x2, rng);
                (void)z;
                const auto dec1 = j == 1 ? ctx.decode_user1_silent(cb, y1, cfg.epsilon)
                                         : ctx.decode_user1(cb, y1, x1, cfg.epsilon);
                if (j >= 2 && (!dec1 || dec1->first != m2)) ++out.err1;
                if (j >= 2) {
                    const auto dec2 = ctx.decode_user2(cb, y2, x2, k2_prev_true, cfg.epsilon);
                    if (!dec2 || dec2->first != m1u || dec2->second != m1s) ++out.err2;
                }
                k2_prev_true = k2;
                k2_prev_hat = dec1 ? dec1->second : 0;
            }
            results[t] = out;
        }
    });

    SimReport rep;
    rep.trials = cfg.trials;
    rep.seed = cfg.seed;
    std::uint64_t e1 = 0, e2 = 0;
    for (const auto& r : results) {
        e1 += r.err1;
        e2 += r.err2;
    }
    rep.pe1 = static_cast<double>(e1) / (static_cast<double>(cfg.trials) * blocks_counted);
    rep.pe2 = static_cast<double>(e2) / (static_cast<double>(cfg.trials) * blocks_counted);

    // leakage, averaged over the first leakage_draws trial codebooks
    const int draws = std::min(cfg.trials, std::max(1, cfg.leakage_draws));
    bool exact_ok = ctx.channel().deterministic();
    if (exact_ok) {
        try {
            const CodebookPair cb0 = ctx.build_codebooks(derive_seed(cfg.seed, kStreamCodebook, 0));
            (void)ctx.exact_leakage(cb0);
            (void)ctx.exact_joint_leakage(cb0);
        } catch (const CapExceeded&) {
            exact_ok = false;
        }
    }
    std::vector<double> leak(draws, 0.0), leakj(draws, 0.0);
    parallel_chunks(static_cast<std::uint64_t>(draws),
                    [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
        for (std::uint64_t d = lo; d < hi; ++d) {
            const CodebookPair cb =
                ctx.build_codebooks(derive_seed(cfg.seed, kStreamCodebook, d));
            if (exact_ok) {
                leak[d] = ctx.exact_leakage(cb);
                leakj[d] = ctx.exact_joint_leakage(cb);
            } else {
                Rng r1(derive_seed(cfg.seed, kStreamLeak, d));
                leak[d] = ctx.estimate_leakage(cb, r1, cfg.trials);
                Rng r2(derive_seed(cfg.seed, kStreamJoint, d));
                leakj[d] = ctx.estimate_joint_leakage(cb, r2, cfg.trials);
            }
        }
    });
    for (int d = 0; d < draws; ++d) {
        rep.leakage_onesided += leak[d];
        rep.leakage_joint += leakj[d];
    }
    rep.leakage_onesided /= draws;
    rep.leakage_joint /= draws;
    rep.leakage_estimated = !exact_ok;

    // equivocation bound fields
    try {
        const int ldraws = std::min(cfg.trials, std::max(1, cfg.equivocation_draws));
        double lhs = 0.0, rhs = 0.0;
        bool holds = true;
        for (int d = 0; d < ldraws; ++d) {
            const CodebookPair cb =
                ctx.build_codebooks(derive_seed(cfg.seed, kStreamCodebook, d));
            const EquivocationBound r = ctx.equivocation_bound_check(cb);
            lhs += r.lhs;
            rhs = r.rhs;
            holds = holds && r.holds;
        }
        rep.equivocation_lhs = lhs / ldraws;
        rep.equivocation_rhs = rhs;
        rep.equivocation_holds = holds;
        rep.equivocation_status = "ok";
    } catch (const PreconditionUnmet&) {
        rep.equivocation_lhs = 0.0;
        rep.equivocation_rhs = 0.0;
        rep.equivocation_holds = false;
        rep.equivocation_status = "precondition_unmet";
    } catch (const CapExceeded&) {
        rep.equivocation_lhs = 0.0;
        rep.equivocation_rhs = 0.0;
        rep.equivocation_holds = false;
        rep.equivocation_status = "cap_exceeded";
    }
    return rep;
}

nlohmann::json report_to_json(const SimReport& rep, const SimConfig& cfg,
                              const std::string& channel_name) {
    nlohmann::json j;
    j["pe1"] = rep.pe1;
    j["pe2"] = rep.pe2;
    j["leakage_onesided"] = rep.leakage_onesided;
    j["leakage_joint"] = rep.leakage_joint;
    j["leakage_mode"] = rep.leakage_estimated ? "estimated" : "exact";
    j["equivocation_lhs"] = rep.equivocation_lhs;
    j["equivocation_rhs"] = rep.equivocation_rhs;
    j["equivocation_holds"] = rep.equivocation_holds;
    j["equivocation_status"] = rep.equivocation_status;
    j["trials"] = rep.trials;
    j["seed"] = rep.seed;
    j["config"] = {{"channel", channel_name},
                   {"n", cfg.n},
                   {"b", cfg.b},
                   {"rates",
                    {{"r1u", cfg.r1u},
                     {"r1s", cfg.r1s},
                     {"r1x", cfg.r1x},
                     {"r2", cfg.r2},
                     {"r2k", cfg.r2k},
                     {"r2x", cfg.r2x}}},
                   {"epsilon", cfg.epsilon},
                   {"trials", cfg.trials},
                   {"cap", cfg.cap_exponent},
                   {"p_u1", cfg.policy.u1_marginal()},
                   {"p_u2", cfg.policy.u2_marginal()}};
    return j;
}

}  // namespace secrecy
