#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "secrecy/channel.hpp"
#include "secrecy/policy.hpp"

namespace secrecy {

struct RatePoint {
    double r1s = 0.0;  // user 1 secret rate, bits/use
    double r2 = 0.0;   // user 2 public rate, bits/use
};

/// Single-policy bounds for the with-feedback inner region. The achievable
/// rectangle is {0 <= r1s <= r1s_bound(), 0 <= r2 <= r2_bound} when feasible.
struct PolicyBounds {
    double r1s_sum_bound = 0.0;  // I(U1;Y2|X2,Q) + I(U2;Y1|X1,Q) - I(U1U2;Z)
    double r1s_key_bound = 0.0;  // I(U1;Y2|X2,Q) - I(U1;Z)
    double r2_bound = 0.0;       // I(U2;Y1|X1,Q)
    bool feasible = false;       // I(U2;Y1|X1,Q) >= I(U2;Z)

    double r1s_bound() const {
        const double m = std::min(r1s_sum_bound, r1s_key_bound);
        return m > 0.0 ? m : 0.0;
    }
};

/// Single-policy no-feedback polytope:
///   r1s <= r1s_cap,  r1s + r2 <= sum_cap,  r2 <= r2_cap  (all coords >= 0).
struct NoFeedbackPolytope {
    double r1s_cap = 0.0;
    double sum_cap = 0.0;
    double r2_cap = 0.0;
    bool feasible = false;

    bool contains(RatePoint p, double tol = 1e-12) const {
        return feasible && p.r1s >= -tol && p.r2 >= -tol && p.r1s <= r1s_cap + tol &&
               p.r2 <= r2_cap + tol && p.r1s + p.r2 <= sum_cap + tol;
    }
    /// Vertices of the polytope (for hull accumulation).
    std::vector<RatePoint> corners() const;
};

struct OuterBounds {
    double r1s_bound = 0.0;
    double r2_bound = 0.0;
};

enum class RegionKind { inner_feedback, inner_nofeedback, outer };

std::string kind_name(RegionKind k);

/// Policy sweep parameters. Marginals run over {i/N} with N = round(1/step);
/// q_card=2 adds a second policy component mixed by a weight on a 0.05 grid;
/// prefix_step > 0 additionally sweeps binary symmetric prefix channels with
/// crossover {0, prefix_step, ...} <= 0.5 at both users.
struct GridSpec {
    double step = 0.02;
    int q_card = 1;
    double prefix_step = 0.0;
    double q_weight_step = 0.05;
    // test hook: overrides the marginal grid for user inputs when non-empty
    std::vector<std::vector<double>> marginal_override;
};

struct RateRegion {
    std::vector<RatePoint> points;  // boundary-contributing corner points
    std::vector<RatePoint> hull;    // upper-right boundary, increasing r2
    RegionKind label = RegionKind::inner_feedback;
    GridSpec grid;

    double max_r1s() const;
    double max_r2() const;
    /// Boundary value r1s_max(r2) by linear interpolation along the hull;
    /// negative for r2 beyond the region.
    double boundary_r1s(double r2) const;
};

/// Eq.-style evaluation of the with-feedback inner bound at one policy.
PolicyBounds inner_point(const TwoWayChannel& ch, const InputPolicy& pol);

/// No-feedback polytope at one policy (key and pad rates forced to zero,
/// eavesdropper credited with knowledge of the public message).
NoFeedbackPolytope nofeedback_point(const TwoWayChannel& ch, const InputPolicy& pol);

/// Common-output converse bounds at a given joint input law over (X1, X2).
/// Requires has_common_output(ch).
OuterBounds outer_common_output_point(const TwoWayChannel& ch, const Pmf& px1x2);

/// General converse bounds at a supplied auxiliary law over (Q, U, V, X1, X2)
/// respecting p(q)p(u|q)p(v|u)p(x1,x2|v). Violations raise MarkovViolation.
OuterBounds outer_general_point(const TwoWayChannel& ch, const Pmf& aux);

/// Upper-right convex boundary of the downward closure of the given points.
/// Deterministic: increasing r2, non-increasing r1s, collinear vertices
/// removed.
std::vector<RatePoint> convex_hull(std::vector<RatePoint> points);

bool region_contains(const RateRegion& region, RatePoint pt, double tol = 1e-9);

/// Sweep the policy grid and assemble the hull for the requested curve.
RateRegion sweep(const TwoWayChannel& ch, const GridSpec& grid, RegionKind kind);

/// CSV rows `r2,r1s_max,label`, 201 samples per region, 9 significant digits.
void write_region_csv(std::ostream& out, const std::vector<RateRegion>& regions);

nlohmann::json region_to_json(const RateRegion& region);

}  // namespace secrecy
