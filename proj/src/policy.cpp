#include "secrecy/policy.hpp"

#include <cmath>

#include "secrecy/errors.hpp"

namespace secrecy {

namespace {

constexpr double kRowTol = 1e-12;

void check_rows(const std::vector<std::vector<double>>& rows, std::size_t expect_rows,
                const char* what) {
    if (rows.size() != expect_rows)
        throw ValidationError(std::string("policy: wrong row count in ") + what);
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    if (cols == 0) throw ValidationError(std::string("policy: empty rows in ") + what);
    for (const auto& r : rows) {
        if (r.size() != cols)
            throw ValidationError(std::string("policy: ragged rows in ") + what);
        double sum = 0.0;
        for (double p : r) {
            if (!(p >= 0.0))
                throw ValidationError(std::string("policy: negative entry in ") + what);
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowTol)
            throw ValidationError(std::string("policy: row does not sum to 1 in ") + what);
    }
}

}  // namespace

void InputPolicy::validate() const {
    if (q_weights.empty()) throw ValidationError("policy: |Q| must be >= 1");
    double qs = 0.0;
    for (double w : q_weights) {
        if (!(w >= 0.0)) throw ValidationError("policy: negative q weight");
        qs += w;
    }
    if (std::abs(qs - 1.0) > kRowTol) throw ValidationError("policy: q weights do not sum to 1");
    check_rows(u1_given_q, q_weights.size(), "u1_given_q");
    check_rows(u2_given_q, q_weights.size(), "u2_given_q");
    check_rows(x1_given_u1, static_cast<std::size_t>(u1_card()), "x1_given_u1");
    check_rows(x2_given_u2, static_cast<std::size_t>(u2_card()), "x2_given_u2");
}

std::vector<double> InputPolicy::u1_marginal() const {
    std::vector<double> m(static_cast<std::size_t>(u1_card()), 0.0);
    for (int q = 0; q < q_card(); ++q)
        for (int u = 0; u < u1_card(); ++u) m[u] += q_weights[q] * u1_given_q[q][u];
    return m;
}

std::vector<double> InputPolicy::u2_marginal() const {
    std::vector<double> m(static_cast<std::size_t>(u2_card()), 0.0);
    for (int q = 0; q < q_card(); ++q)
        for (int u = 0; u < u2_card(); ++u) m[u] += q_weights[q] * u2_given_q[q][u];
    return m;
}

bool InputPolicy::deterministic_prefixes() const {
    for (const auto* tbl : {&x1_given_u1, &x2_given_u2})
        for (const auto& row : *tbl)
            for (double p : row)
                if (p != 0.0 && p != 1.0) return false;
    return true;
}

InputPolicy InputPolicy::iid(std::vector<double> p_u1, std::vector<double> p_u2) {
    InputPolicy pol;
    pol.q_weights = {1.0};
    pol.u1_given_q = {p_u1};
    pol.u2_given_q = {p_u2};
    auto identity = [](std::size_t k) {
        std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i) m[i][i] = 1.0;
        return m;
    };
    pol.x1_given_u1 = identity(p_u1.size());
    pol.x2_given_u2 = identity(p_u2.size());
    pol.validate();
    return pol;
}

InputPolicy InputPolicy::iid_binary(double p1, double p2) {
    return iid({1.0 - p1, p1}, {1.0 - p2, p2});
}

Pmf joint_from_policy(const TwoWayChannel& ch, const InputPolicy& pol) {
    pol.validate();
    if (pol.x1_card() != ch.x1_size || pol.x2_card() != ch.x2_size)
        throw DimensionMismatch("policy prefix outputs do not match channel input alphabets");
    const int Q = pol.q_card(), U1 = pol.u1_card(), U2 = pol.u2_card();
    const int X1 = ch.x1_size, X2 = ch.x2_size;
    const int Y1 = ch.y1_size, Y2 = ch.y2_size, Z = ch.z_size;
    std::vector<Pmf::Var> vars = {{"Q", Q},   {"U1", U1}, {"U2", U2}, {"X1", X1},
                                  {"X2", X2}, {"Y1", Y1}, {"Y2", Y2}, {"Z", Z}};
    std::vector<double> table(static_cast<std::size_t>(Q) * U1 * U2 * X1 * X2 * Y1 * Y2 * Z, 0.0);
    std::size_t pos = 0;
    for (int q = 0; q < Q; ++q)
        for (int u1 = 0; u1 < U1; ++u1)
            for (int u2 = 0; u2 < U2; ++u2) {
                const double pu = pol.q_weights[q] * pol.u1_given_q[q][u1] * pol.u2_given_q[q][u2];
                for (int x1 = 0; x1 < X1; ++x1)
                    for (int x2 = 0; x2 < X2; ++x2) {
                        const double px = pu * pol.x1_given_u1[u1][x1] * pol.x2_given_u2[u2][x2];
                        const std::size_t base = ch.idx(x1, x2, 0, 0, 0);
                        if (px == 0.0) {
                            pos += ch.out_size();
                            continue;
                        }
                        for (std::size_t k = 0; k < ch.out_size(); ++k)
                            table[pos++] = px * ch.transitions[base + k];
                    }
            }
    return Pmf(std::move(vars), std::move(table));
}

}  // namespace secrecy
