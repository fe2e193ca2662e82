#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace secrecy {

/// Labeled joint probability table over named finite variables.
///
/// The table is a dense row-major tensor with one axis per variable.
/// Entries are non-negative and sum to 1 within 1e-12. All entropy and
/// mutual-information arithmetic is base-2 with 0*log' 0 := 0, and
/// conditional quantities are always combinations of joint entropies
/// (conditional tables are never materialized).
class Pmf {
  public:
    struct Var {
        std::string name;
        int card = 0;
    };

    Pmf(std::vector<Var> vars, std::vector<double> table);

    const std::vector<Var>& vars() const { return vars_; }
    const std::vector<double>& table() const { return table_; }
    std::size_t size() const { return table_.size(); }

    bool has(std::string_view name) const;
    int axis(std::string_view name) const;  // throws UnknownVariable
    int card(std::string_view name) const;

    /// Marginal over the named variables (kept in this Pmf's axis order).
    Pmf marginal(const std::vector<std::string>& keep) const;

    /// H(vars) in bits. An empty set has zero entropy.
    double entropy(const std::vector<std::string>& vars) const;

    /// H(a | given) = H(a,given) - H(given); clamped to be non-negative.
    double conditional_entropy(const std::vector<std::string>& a,
                               const std::vector<std::string>& given) const;

    /// I(a ; b | given), clamped to 0 when within 1e-12 below zero.
    double mutual_info(const std::vector<std::string>& a, const std::vector<std::string>& b,
                       const std::vector<std::string>& given = {}) const;

  private:
    std::uint64_t mask_of(const std::vector<std::string>& names) const;
    double entropy_mask(std::uint64_t mask) const;

    std::vector<Var> vars_;
    std::vector<double> table_;
    std::vector<std::size_t> strides_;
};

/// Shannon entropy (bits) of a raw non-negative weight vector normalized by
/// its own sum; returns 0 for an all-zero vector.
double entropy_of(std::span<const double> weights);

}  // namespace secrecy
