#pragma once

#include <vector>

#include "secrecy/channel.hpp"
#include "secrecy/pmf.hpp"

namespace secrecy {

/// Factored input law p(q) p(u1|q) p(u2|q) p(x1|u1) p(x2|u2).
/// The x|u tables are the prefix channels; identity rows mean no prefixing.
struct InputPolicy {
    std::vector<double> q_weights;                  // |Q|
    std::vector<std::vector<double>> u1_given_q;    // |Q| rows of |U1|
    std::vector<std::vector<double>> u2_given_q;    // |Q| rows of |U2|
    std::vector<std::vector<double>> x1_given_u1;   // |U1| rows of |X1|
    std::vector<std::vector<double>> x2_given_u2;   // |U2| rows of |X2|

    int q_card() const { return static_cast<int>(q_weights.size()); }
    int u1_card() const { return u1_given_q.empty() ? 0 : static_cast<int>(u1_given_q[0].size()); }
    int u2_card() const { return u2_given_q.empty() ? 0 : static_cast<int>(u2_given_q[0].size()); }
    int x1_card() const { return x1_given_u1.empty() ? 0 : static_cast<int>(x1_given_u1[0].size()); }
    int x2_card() const { return x2_given_u2.empty() ? 0 : static_cast<int>(x2_given_u2[0].size()); }

    /// Rows sum to 1 within 1e-12, cardinalities chain consistently.
    void validate() const;

    /// Marginal p(u1) (or p(u2)) summed over Q.
    std::vector<double> u1_marginal() const;
    std::vector<double> u2_marginal() const;

    bool deterministic_prefixes() const;

    /// |Q|=1 policy with given u-marginals and identity prefixes (U = X).
    static InputPolicy iid(std::vector<double> p_u1, std::vector<double> p_u2);
    /// Binary-input shorthand: U1=X1~Bern(p1), U2=X2~Bern(p2).
    static InputPolicy iid_binary(double p1, double p2);
};

/// Full joint over (Q, U1, U2, X1, X2, Y1, Y2, Z) from policy x channel.
/// Throws DimensionMismatch when policy prefix outputs do not match the
/// channel input alphabets.
Pmf joint_from_policy(const TwoWayChannel& ch, const InputPolicy& pol);

}  // namespace secrecy
