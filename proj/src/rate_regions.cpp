#include "secrecy/rate_regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "secrecy/errors.hpp"
#include "secrecy/parallel.hpp"

namespace secrecy {

namespace {

constexpr double kFeasTol = 1e-12;

struct InnerTerms {
    double a1, a2, c12, c1, c2;
};

InnerTerms inner_terms(const TwoWayChannel& ch, const InputPolicy& pol) {
    const Pmf j = joint_from_policy(ch, pol);
    InnerTerms t{};
    t.a1 = j.mutual_info({"U1"}, {"Y2"}, {"X2", "Q"});
    t.a2 = j.mutual_info({"U2"}, {"Y1"}, {"X1", "Q"});
    t.c12 = j.mutual_info({"U1", "U2"}, {"Z"});
    t.c1 = j.mutual_info({"U1"}, {"Z"});
    t.c2 = j.mutual_info({"U2"}, {"Z"});
    return t;
}

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

std::string kind_name(RegionKind k) {
    switch (k) {
        case RegionKind::inner_feedback: return "inner_feedback";
        case RegionKind::inner_nofeedback: return "inner_nofeedback";
        case RegionKind::outer: return "outer";
    }
    return "?";
}

PolicyBounds inner_point(const TwoWayChannel& ch, const InputPolicy& pol) {
    const InnerTerms t = inner_terms(ch, pol);
    PolicyBounds b;
    b.r1s_sum_bound = t.a1 + t.a2 - t.c12;
    b.r1s_key_bound = t.a1 - t.c1;
    b.r2_bound = t.a2;
    b.feasible = t.a2 >= t.c2 - kFeasTol;
    return b;
}

NoFeedbackPolytope nofeedback_point(const TwoWayChannel& ch, const InputPolicy& pol) {
    const InnerTerms t = inner_terms(ch, pol);
    NoFeedbackPolytope p;
    p.r1s_cap = clamp0(t.a1 - t.c1);
    p.sum_cap = clamp0(t.a1 + t.a2 - t.c12);
    p.r2_cap = clamp0(t.a2);
    // the sub-rate system is solvable only when the randomization budget
    // covers every binning constraint, even at zero message rates
    p.feasible = t.a2 >= t.c2 - kFeasTol && t.a1 - t.c1 >= -kFeasTol &&
                 t.a1 + t.a2 - t.c12 >= -kFeasTol;
    return p;
}

std::vector<RatePoint> NoFeedbackPolytope::corners() const {
    if (!feasible) return {};
    std::vector<RatePoint> v;
    const double a = std::min(r1s_cap, sum_cap);
    v.push_back({a, 0.0});
    v.push_back({0.0, std::min(r2_cap, sum_cap)});
    if (sum_cap >= r1s_cap)
        v.push_back({r1s_cap, std::min(r2_cap, sum_cap - r1s_cap)});
    if (sum_cap >= r2_cap)
        v.push_back({std::min(r1s_cap, sum_cap - r2_cap), r2_cap});
    return v;
}

OuterBounds outer_common_output_point(const TwoWayChannel& ch, const Pmf& px1x2) {
    if (!has_common_output(ch))
        throw NotCommonOutput("outer_common_output_point: channel outputs differ");
    if (px1x2.card("X1") != ch.x1_size || px1x2.card("X2") != ch.x2_size)
        throw DimensionMismatch("input law does not match channel alphabets");
    // joint over (X1, X2, Z); z-law is the z-marginal of the transition tensor
    const int X1 = ch.x1_size, X2 = ch.x2_size, Z = ch.z_size;
    std::vector<double> table(static_cast<std::size_t>(X1) * X2 * Z, 0.0);
    const Pmf in = px1x2.marginal({"X1", "X2"});
    const bool x1_first = in.axis("X1") == 0;
    for (int x1 = 0; x1 < X1; ++x1)
        for (int x2 = 0; x2 < X2; ++x2) {
            const std::size_t in_pos = x1_first
                                           ? static_cast<std::size_t>(x1) * X2 + x2
                                           : static_cast<std::size_t>(x2) * X1 + x1;
            const double px = in.table()[in_pos];
            if (px == 0.0) continue;
            for (int y1 = 0; y1 < ch.y1_size; ++y1)
                for (int y2 = 0; y2 < ch.y2_size; ++y2)
                    for (int z = 0; z < Z; ++z)
                        table[(static_cast<std::size_t>(x1) * X2 + x2) * Z + z] +=
                            px * ch.p(x1, x2, y1, y2, z);
        }
    const Pmf jt({{"X1", X1}, {"X2", X2}, {"Z", Z}}, std::move(table));
    OuterBounds b;
    b.r1s_bound = clamp0(std::min(jt.conditional_entropy({"X1"}, {"Z"}),
                                  jt.conditional_entropy({"X2"}, {"Z"})));
    b.r2_bound = clamp0(jt.mutual_info({"X2"}, {"Z"}, {"X1"}));
    return b;
}

OuterBounds outer_general_point(const TwoWayChannel& ch, const Pmf& aux) {
    for (const char* v : {"Q", "U", "V", "X1", "X2"})
        if (!aux.has(v))
            throw DimensionMismatch(std::string("auxiliary law missing variable ") + v);
    if (aux.card("X1") != ch.x1_size || aux.card("X2") != ch.x2_size)
        throw DimensionMismatch("auxiliary law does not match channel alphabets");
    // Markov structure: Q -> U -> V -> (X1, X2)
    if (aux.mutual_info({"V"}, {"Q"}, {"U"}) > 1e-9)
        throw MarkovViolation("auxiliary law: V depends on Q beyond U");
    if (aux.mutual_info({"X1", "X2"}, {"Q", "U"}, {"V"}) > 1e-9)
        throw MarkovViolation("auxiliary law: (X1,X2) depends on (Q,U) beyond V");

    const int Q = aux.card("Q"), U = aux.card("U"), V = aux.card("V");
    const int X1 = ch.x1_size, X2 = ch.x2_size;
    const Pmf base = aux.marginal({"Q", "U", "V", "X1", "X2"});
    // extend with the channel law
    std::vector<Pmf::Var> vars = {{"Q", Q},   {"U", U},   {"V", V},
                                  {"X1", X1}, {"X2", X2}, {"Y1", ch.y1_size},
                                  {"Y2", ch.y2_size}, {"Z", ch.z_size}};
    std::vector<double> table(base.size() * ch.out_size());
    // base is ordered by aux's own axis order; rebuild positions explicitly
    std::vector<int> order = {base.axis("Q"), base.axis("U"), base.axis("V"), base.axis("X1"),
                              base.axis("X2")};
    std::vector<std::size_t> strides(5, 1);
    {
        std::vector<std::size_t> s(5, 1);
        for (int i = 3; i >= 0; --i)
            s[i] = s[i + 1] * static_cast<std::size_t>(base.vars()[i + 1].card);
        for (int k = 0; k < 5; ++k) strides[k] = s[order[k]];
    }
    std::size_t pos = 0;
    for (int q = 0; q < Q; ++q)
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < V; ++v)
                for (int x1 = 0; x1 < X1; ++x1)
                    for (int x2 = 0; x2 < X2; ++x2) {
                        const double p = base.table()[q * strides[0] + u * strides[1] +
                                                      v * strides[2] + x1 * strides[3] +
                                                      x2 * strides[4]];
                        const std::size_t cb = ch.idx(x1, x2, 0, 0, 0);
                        for (std::size_t k = 0; k < ch.out_size(); ++k)
                            table[pos++] = p * ch.transitions[cb + k];
                    }
    const Pmf j(std::move(vars), std::move(table));
    const double izu = j.mutual_info({"V"}, {"Z"}, {"U"});
    const double b2 = j.mutual_info({"V"}, {"X2", "Y2"}, {"U"}) - izu;
    const double b1 = j.mutual_info({"V"}, {"X1", "Y1"}, {"U"}) - izu;
    OuterBounds b;
    b.r1s_bound = clamp0(std::min(b1, b2));
    b.r2_bound = clamp0(j.mutual_info({"X2"}, {"Y1"}, {"X1"}));
    return b;
}

std::vector<RatePoint> convex_hull(std::vector<RatePoint> points) {
    if (points.empty()) throw ValidationError("convex_hull: needs at least one point");
    // snap to a 2^-40 grid so fp jitter in entropy sums cannot create
    // spurious near-duplicate vertices
    auto snap = [](double v) { return std::nearbyint(v * 0x1p40) * 0x1p-40; };
    // downward-closure augmentation: axis projections of every point
    std::vector<RatePoint> pts;
    pts.reserve(points.size() * 3 + 1);
    pts.push_back({0.0, 0.0});
    for (const auto& p : points) {
        if (!(std::isfinite(p.r1s) && std::isfinite(p.r2)) || p.r1s < -1e-12 || p.r2 < -1e-12)
            throw ValidationError("convex_hull: invalid rate point");
        const double a = snap(clamp0(p.r1s)), b = snap(clamp0(p.r2));
        pts.push_back({a, b});
        pts.push_back({a, 0.0});
        pts.push_back({0.0, b});
    }
    // sort by (r2, r1s); keep only the top point per r2 for the upper chain
    std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) {
        if (a.r2 != b.r2) return a.r2 < b.r2;
        return a.r1s < b.r1s;
    });
    std::vector<RatePoint> top;
    for (const auto& p : pts) {
        if (!top.empty() && top.back().r2 == p.r2)
            top.back() = p;
        else
            top.push_back(p);
    }
    // Andrew monotone chain, upper hull in (x=r2, y=r1s)
    auto cross = [](const RatePoint& o, const RatePoint& a, const RatePoint& b) {
        return (a.r2 - o.r2) * (b.r1s - o.r1s) - (a.r1s - o.r1s) * (b.r2 - o.r2);
    };
    std::vector<RatePoint> hull;
    for (const auto& p : top) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= -1e-15)
            hull.pop_back();
        hull.push_back(p);
    }
    // terminal drop to the r2 axis closes the staircase
    if (hull.back().r1s > 0.0) hull.push_back({0.0, hull.back().r2});
    return hull;
}

double RateRegion::max_r1s() const {
    double m = 0.0;
    for (const auto& p : hull) m = std::max(m, p.r1s);
    return m;
}

double RateRegion::max_r2() const {
    return hull.empty() ? 0.0 : hull.back().r2;
}

double RateRegion::boundary_r1s(double r2) const {
    if (hull.empty()) return -1.0;
    if (r2 < 0.0) r2 = 0.0;
    if (r2 > hull.back().r2 + 1e-15) return -1.0;
    if (hull.size() == 1) return hull[0].r1s;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (r2 <= hull[i].r2 + 1e-15) {
            const auto& a = hull[i - 1];
            const auto& b = hull[i];
            if (b.r2 == a.r2) return std::max(a.r1s, b.r1s);
            const double t = std::clamp((r2 - a.r2) / (b.r2 - a.r2), 0.0, 1.0);
            return a.r1s + t * (b.r1s - a.r1s);
        }
    }
    return hull.back().r1s;
}

bool region_contains(const RateRegion& region, RatePoint pt, double tol) {
    if (pt.r1s < -tol || pt.r2 < -tol) return false;
    if (region.hull.empty()) return false;
    if (pt.r2 > region.max_r2() + tol) return false;
    const double top = region.boundary_r1s(std::clamp(pt.r2, 0.0, region.max_r2()));
    return pt.r1s <= top + tol;
}

namespace {

// probability vectors over k symbols with entries i/N
void compositions(int k, int N, std::vector<double>& cur, std::vector<std::vector<double>>& out) {
    if (k == 1) {
        double rest = 1.0;
        for (double v : cur) rest -= v;
        cur.push_back(rest < 0.0 ? 0.0 : rest);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    double used = 0.0;
    for (double v : cur) used += v;
    const int remaining = N - static_cast<int>(std::llround(used * N));
    for (int i = 0; i <= remaining; ++i) {
        cur.push_back(static_cast<double>(i) / N);
        compositions(k - 1, N, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<double>> marginal_grid(int card, double step) {
    const int N = std::max(1, static_cast<int>(std::llround(1.0 / step)));
    std::vector<std::vector<double>> out;
    std::vector<double> cur;
    compositions(card, N, cur, out);
    return out;
}

std::vector<double> crossover_grid(double prefix_step) {
    std::vector<double> out;
    if (prefix_step <= 0.0) return out;
    for (double c = 0.0; c <= 0.5 + 1e-12; c += prefix_step) out.push_back(std::min(c, 0.5));
    return out;
}

std::vector<std::vector<double>> bsc_prefix(double crossover) {
    return {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}};
}

std::vector<std::vector<double>> identity_prefix(int k) {
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) m[i][i] = 1.0;
    return m;
}

// Addressable policy enumeration so sweeps can fan out by index.
struct PolicyGrid {
    std::vector<std::vector<double>> m1, m2;  // candidate u marginals
    std::vector<double> qw;                   // q weights (q_card == 2)
    std::vector<double> cross;                // prefix crossovers; empty = identity
    int x1_card = 2, x2_card = 2;
    bool q2 = false;

    std::uint64_t count() const {
        std::uint64_t c = static_cast<std::uint64_t>(m1.size()) * m2.size();
        if (q2) c *= static_cast<std::uint64_t>(m1.size()) * m2.size() * qw.size();
        if (!cross.empty()) c *= static_cast<std::uint64_t>(cross.size()) * cross.size();
        return c;
    }

    InputPolicy at(std::uint64_t idx) const {
        InputPolicy pol;
        std::uint64_t rest = idx;
        double c1 = 0.0, c2v = 0.0;
        bool use_bsc = !cross.empty();
        if (use_bsc) {
            c2v = cross[rest % cross.size()];
            rest /= cross.size();
            c1 = cross[rest % cross.size()];
            rest /= cross.size();
        }
        const auto& g1 = m1;
        const auto& g2 = m2;
        if (!q2) {
            const std::uint64_t i2 = rest % g2.size();
            rest /= g2.size();
            const std::uint64_t i1 = rest % g1.size();
            pol.q_weights = {1.0};
            pol.u1_given_q = {g1[i1]};
            pol.u2_given_q = {g2[i2]};
        } else {
            const std::uint64_t i2b = rest % g2.size();
            rest /= g2.size();
            const std::uint64_t i1b = rest % g1.size();
            rest /= g1.size();
            const std::uint64_t i2a = rest % g2.size();
            rest /= g2.size();
            const std::uint64_t i1a = rest % g1.size();
            rest /= g1.size();
            const double w = qw[rest % qw.size()];
            pol.q_weights = {1.0 - w, w};
            pol.u1_given_q = {g1[i1a], g1[i1b]};
            pol.u2_given_q = {g2[i2a], g2[i2b]};
        }
        pol.x1_given_u1 = use_bsc ? bsc_prefix(c1) : identity_prefix(x1_card);
        pol.x2_given_u2 = use_bsc ? bsc_prefix(c2v) : identity_prefix(x2_card);
        return pol;
    }
};

PolicyGrid make_policy_grid(const TwoWayChannel& ch, const GridSpec& grid) {
    if (!(grid.step > 0.0 && grid.step <= 0.5))
        throw ValidationError("sweep: grid step must be in (0, 0.5]");
    if (grid.q_card != 1 && grid.q_card != 2)
        throw ValidationError("sweep: q_card must be 1 or 2");
    if (grid.prefix_step > 0.0 && (ch.x1_size != 2 || ch.x2_size != 2))
        throw ValidationError("sweep: prefix grid supports binary inputs only");
    PolicyGrid g;
    g.x1_card = ch.x1_size;
    g.x2_card = ch.x2_size;
    g.q2 = grid.q_card == 2;
    if (!grid.marginal_override.empty()) {
        g.m1 = grid.marginal_override;
        g.m2 = grid.marginal_override;
    } else {
        g.m1 = marginal_grid(ch.x1_size, grid.step);
        g.m2 = marginal_grid(ch.x2_size, grid.step);
    }
    if (g.q2) {
        const int N = std::max(1, static_cast<int>(std::llround(1.0 / grid.q_weight_step)));
        for (int i = 0; i <= N; ++i) g.qw.push_back(static_cast<double>(i) / N);
    }
    g.cross = crossover_grid(grid.prefix_step);
    return g;
}

void append_policy_points(const TwoWayChannel& ch, const InputPolicy& pol, RegionKind kind,
                          std::vector<RatePoint>& out) {
    switch (kind) {
        case RegionKind::inner_feedback: {
            const PolicyBounds b = inner_point(ch, pol);
            if (b.feasible) out.push_back({b.r1s_bound(), clamp0(b.r2_bound)});
            break;
        }
        case RegionKind::inner_nofeedback: {
            const NoFeedbackPolytope p = nofeedback_point(ch, pol);
            if (p.feasible)
                for (const auto& c : p.corners()) out.push_back(c);
            break;
        }
        case RegionKind::outer: {
            const Pmf in = joint_from_policy(ch, pol).marginal({"X1", "X2"});
            const OuterBounds b = outer_common_output_point(ch, in);
            out.push_back({b.r1s_bound, b.r2_bound});
            break;
        }
    }
}

}  // namespace

RateRegion sweep(const TwoWayChannel& ch, const GridSpec& grid, RegionKind kind) {
    if (kind == RegionKind::outer && !has_common_output(ch))
        throw NotCommonOutput("sweep: outer curve requires a common-output channel");
    const PolicyGrid pg = make_policy_grid(ch, grid);
    const std::uint64_t total = pg.count();

    const unsigned workers = std::max(1u, worker_count());
    std::vector<std::vector<RatePoint>> partial(workers);
    parallel_chunks(total, [&](std::uint64_t b, std::uint64_t e, unsigned w) {
        std::vector<RatePoint> local;
        for (std::uint64_t i = b; i < e; ++i)
            append_policy_points(ch, pg.at(i), kind, local);
        // reduce to hull vertices to keep the merge small
        if (!local.empty()) local = convex_hull(std::move(local));
        partial[w] = std::move(local);
    });

    std::vector<RatePoint> merged;
    for (auto& v : partial)
        merged.insert(merged.end(), v.begin(), v.end());
    if (merged.empty()) throw EmptyRegion("sweep: no feasible policy on the grid");

    RateRegion region;
    region.label = kind;
    region.grid = grid;
    region.points = merged;
    region.hull = convex_hull(std::move(merged));
    return region;
}

void write_region_csv(std::ostream& out, const std::vector<RateRegion>& regions) {
    out << "r2,r1s_max,label\n";
    char buf[64];
    for (const auto& region : regions) {
        const double mr2 = region.max_r2();
        for (int i = 0; i <= 200; ++i) {
            const double r2 = mr2 * i / 200.0;
            const double r1s = std::max(0.0, region.boundary_r1s(r2));
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,", r2, r1s);
            out << buf << kind_name(region.label) << "\n";
        }
    }
}

nlohmann::json region_to_json(const RateRegion& region) {
    nlohmann::json j;
    j["label"] = kind_name(region.label);
    nlohmann::json hull = nlohmann::json::array();
    for (const auto& p : region.hull) hull.push_back({{"r1s", p.r1s}, {"r2", p.r2}});
    j["hull"] = std::move(hull);
    j["grid"] = {{"step", region.grid.step},
                 {"q_card", region.grid.q_card},
                 {"prefix", region.grid.prefix_step}};
    return j;
}

}  // namespace secrecy
