#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace secrecy {

/// Discrete memoryless two-way wiretap channel p(y1,y2,z | x1,x2) over finite
/// alphabets, stored as a dense transition tensor. Immutable in practice:
/// construct, validate once, then share freely across threads.
struct TwoWayChannel {
    std::string name;
    int x1_size = 0;
    int x2_size = 0;
    int y1_size = 0;
    int y2_size = 0;
    int z_size = 0;
    // row-major over (x1, x2, y1, y2, z)
    std::vector<double> transitions;

    std::size_t out_size() const {
        return static_cast<std::size_t>(y1_size) * y2_size * z_size;
    }
    std::size_t idx(int x1, int x2, int y1, int y2, int z) const {
        return ((((static_cast<std::size_t>(x1) * x2_size + x2) * y1_size + y1) * y2_size + y2) *
                z_size) +
               z;
    }
    double p(int x1, int x2, int y1, int y2, int z) const {
        return transitions[idx(x1, x2, y1, y2, z)];
    }

    /// Throws ValidationError unless every conditional row sums to 1 within
    /// 1e-9, all entries are non-negative, and all alphabet sizes are >= 1.
    void validate() const;

    /// True when every (x1,x2) row is a point mass on a single output triple.
    bool deterministic() const;
};

TwoWayChannel builtin_bmc();
TwoWayChannel builtin_xor();
TwoWayChannel builtin_adder();

/// Lookup by name ("bmc", "xor", "adder"); throws ValidationError otherwise.
TwoWayChannel builtin_channel(const std::string& name);

/// True iff y1/y2/z alphabets coincide and all probability mass sits on
/// output triples with y1 == y2 == z.
bool has_common_output(const TwoWayChannel& ch);

/// Parse a channel document. Structural problems raise SchemaError,
/// probability violations raise ValidationError.
TwoWayChannel load_channel(const nlohmann::json& doc);
TwoWayChannel load_channel_file(const std::string& path);

nlohmann::json channel_to_json(const TwoWayChannel& ch);

}  // namespace secrecy
