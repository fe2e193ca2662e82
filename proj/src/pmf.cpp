#include "secrecy/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "secrecy/errors.hpp"

namespace secrecy {

namespace {
constexpr double kSumTol = 1e-12;
constexpr double kNegClamp = 1e-12;
}  // namespace

double entropy_of(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : weights) {
        if (w > 0.0) h -= w * std::log2(w / total);
    }
    return h / total;
}

Pmf::Pmf(std::vector<Var> vars, std::vector<double> table)
    : vars_(std::move(vars)), table_(std::move(table)) {
    if (vars_.empty()) throw ValidationError("Pmf: needs at least one variable");
    std::set<std::string> seen;
    std::size_t expect = 1;
    for (const auto& v : vars_) {
        if (v.card < 1) throw ValidationError("Pmf: cardinality must be >= 1 for " + v.name);
        if (!seen.insert(v.name).second)
            throw ValidationError("Pmf: duplicate variable name " + v.name);
        expect *= static_cast<std::size_t>(v.card);
    }
    if (table_.size() != expect) throw ValidationError("Pmf: table size does not match variables");
    double sum = 0.0;
    for (double p : table_) {
        if (!(p >= 0.0)) throw ValidationError("Pmf: negative or NaN entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTol) throw ValidationError("Pmf: table does not sum to 1");
    strides_.assign(vars_.size(), 1);
    for (int i = static_cast<int>(vars_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * static_cast<std::size_t>(vars_[i + 1].card);
}

bool Pmf::has(std::string_view name) const {
    for (const auto& v : vars_)
        if (v.name == name) return true;
    return false;
}

int Pmf::axis(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    throw UnknownVariable("Pmf: unknown variable " + std::string(name));
}

int Pmf::card(std::string_view name) const { return vars_[axis(name)].card; }

std::uint64_t Pmf::mask_of(const std::vector<std::string>& names) const {
    std::uint64_t mask = 0;
    for (const auto& n : names) {
        const int a = axis(n);
        const std::uint64_t bit = 1ULL << a;
        if (mask & bit) throw OverlappingSets("Pmf: variable repeated in set: " + n);
        mask |= bit;
    }
    return mask;
}

double Pmf::entropy_mask(std::uint64_t mask) const {
    if (mask == 0) return 0.0;
    std::size_t msize = 1;
    std::vector<std::size_t> mstride(vars_.size(), 0);
    for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
        if (mask & (1ULL << i)) {
            mstride[i] = msize;
            msize *= static_cast<std::size_t>(vars_[i].card);
        }
    }
    std::vector<double> marg(msize, 0.0);
    std::vector<int> idx(vars_.size(), 0);
    std::size_t mpos = 0;
    for (double p : table_) {
        marg[mpos] += p;
        // odometer over the full table, tracking the reduced index
        for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
            if (++idx[i] < vars_[i].card) {
                mpos += mstride[i];
                break;
            }
            mpos -= mstride[i] * static_cast<std::size_t>(vars_[i].card - 1);
            idx[i] = 0;
        }
    }
    double h = 0.0;
    for (double p : marg)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

Pmf Pmf::marginal(const std::vector<std::string>& keep) const {
    const std::uint64_t mask = mask_of(keep);
    if (mask == 0) throw ValidationError("Pmf: marginal over empty set");
    std::vector<Var> mv;
    std::size_t msize = 1;
    std::vector<std::size_t> mstride(vars_.size(), 0);
    for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
        if (mask & (1ULL << i)) {
            mstride[i] = msize;
            msize *= static_cast<std::size_t>(vars_[i].card);
        }
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (mask & (1ULL << i)) mv.push_back(vars_[i]);
    std::vector<double> marg(msize, 0.0);
    std::vector<int> idx(vars_.size(), 0);
    std::size_t mpos = 0;
    for (double p : table_) {
        marg[mpos] += p;
        for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
            if (++idx[i] < vars_[i].card) {
                mpos += mstride[i];
                break;
            }
            mpos -= mstride[i] * static_cast<std::size_t>(vars_[i].card - 1);
            idx[i] = 0;
        }
    }
    return Pmf(std::move(mv), std::move(marg));
}

double Pmf::entropy(const std::vector<std::string>& vars) const {
    return entropy_mask(mask_of(vars));
}

double Pmf::conditional_entropy(const std::vector<std::string>& a,
                                const std::vector<std::string>& given) const {
    // overlap is permitted: H(A | G) with A inside G is exactly 0
    const std::uint64_t ma = mask_of(a);
    const std::uint64_t mg = mask_of(given);
    double v = entropy_mask(ma | mg) - entropy_mask(mg);
    if (v < 0.0 && v > -kNegClamp) v = 0.0;
    return v;
}

double Pmf::mutual_info(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const std::vector<std::string>& given) const {
    const std::uint64_t ma = mask_of(a);
    const std::uint64_t mb = mask_of(b);
    const std::uint64_t mc = mask_of(given);
    if ((ma & mb) || (ma & mc) || (mb & mc))
        throw OverlappingSets("Pmf: mutual_info sets overlap");
    double v = entropy_mask(ma | mc) + entropy_mask(mb | mc) - entropy_mask(ma | mb | mc) -
               entropy_mask(mc);
    if (v < 0.0 && v > -kNegClamp) v = 0.0;
    return v;
}

}  // namespace secrecy
