#include "secrecy/channel.hpp"

#include <cmath>
#include <fstream>

#include "secrecy/errors.hpp"

namespace secrecy {

namespace {

constexpr double kRowTol = 1e-9;

TwoWayChannel deterministic_binary(const std::string& name, int z_card, int (*f)(int, int)) {
    TwoWayChannel ch;
    ch.name = name;
    ch.x1_size = ch.x2_size = 2;
    ch.y1_size = ch.y2_size = ch.z_size = z_card;
    ch.transitions.assign(4 * ch.out_size(), 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) {
            const int z = f(x1, x2);
            ch.transitions[ch.idx(x1, x2, z, z, z)] = 1.0;
        }
    ch.validate();
    return ch;
}

}  // namespace

void TwoWayChannel::validate() const {
    if (x1_size < 1 || x2_size < 1 || y1_size < 1 || y2_size < 1 || z_size < 1)
        throw ValidationError("channel: alphabet sizes must be >= 1");
    const std::size_t rows = static_cast<std::size_t>(x1_size) * x2_size;
    if (transitions.size() != rows * out_size())
        throw ValidationError("channel: transition tensor has wrong size");
    for (std::size_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (std::size_t k = 0; k < out_size(); ++k) {
            const double p = transitions[r * out_size() + k];
            if (!(p >= 0.0)) throw ValidationError("channel: negative transition probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowTol)
            throw ValidationError("channel: row " + std::to_string(r) +
                                  " does not sum to 1 (got " + std::to_string(sum) + ")");
    }
}

bool TwoWayChannel::deterministic() const {
    const std::size_t rows = static_cast<std::size_t>(x1_size) * x2_size;
    for (std::size_t r = 0; r < rows; ++r) {
        int ones = 0;
        for (std::size_t k = 0; k < out_size(); ++k) {
            const double p = transitions[r * out_size() + k];
            if (p == 1.0)
                ++ones;
            else if (p != 0.0)
                return false;
        }
        if (ones != 1) return false;
    }
    return true;
}

TwoWayChannel builtin_bmc() {
    return deterministic_binary("bmc", 2, [](int a, int b) { return a * b; });
}

TwoWayChannel builtin_xor() {
    return deterministic_binary("xor", 2, [](int a, int b) { return a ^ b; });
}

TwoWayChannel builtin_adder() {
    return deterministic_binary("adder", 3, [](int a, int b) { return a + b; });
}

TwoWayChannel builtin_channel(const std::string& name) {
    if (name == "bmc") return builtin_bmc();
    if (name == "xor") return builtin_xor();
    if (name == "adder") return builtin_adder();
    throw ValidationError("unknown builtin channel: " + name);
}

bool has_common_output(const TwoWayChannel& ch) {
    if (ch.y1_size != ch.y2_size || ch.y1_size != ch.z_size) return false;
    double off = 0.0;
    for (int x1 = 0; x1 < ch.x1_size; ++x1)
        for (int x2 = 0; x2 < ch.x2_size; ++x2)
            for (int y1 = 0; y1 < ch.y1_size; ++y1)
                for (int y2 = 0; y2 < ch.y2_size; ++y2)
                    for (int z = 0; z < ch.z_size; ++z)
                        if (!(y1 == y2 && y2 == z)) off += ch.p(x1, x2, y1, y2, z);
    return off <= 1e-12;
}

TwoWayChannel load_channel(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("channel document must be an object");
    TwoWayChannel ch;
    try {
        ch.name = doc.value("name", std::string{});
        for (const char* key : {"x1_size", "x2_size", "y1_size", "y2_size", "z_size"})
            if (!doc.contains(key) || !doc[key].is_number_integer())
                throw SchemaError(std::string("channel document missing integer field ") + key);
        ch.x1_size = doc["x1_size"].get<int>();
        ch.x2_size = doc["x2_size"].get<int>();
        ch.y1_size = doc["y1_size"].get<int>();
        ch.y2_size = doc["y2_size"].get<int>();
        ch.z_size = doc["z_size"].get<int>();
        if (ch.x1_size < 1 || ch.x2_size < 1 || ch.y1_size < 1 || ch.y2_size < 1 || ch.z_size < 1)
            throw SchemaError("channel alphabet sizes must be >= 1");
        if (!doc.contains("rows") || !doc["rows"].is_array())
            throw SchemaError("channel document missing rows array");
        const auto& rows = doc["rows"];
        const std::size_t nrows = static_cast<std::size_t>(ch.x1_size) * ch.x2_size;
        if (rows.size() != nrows)
            throw SchemaError("rows array must have one entry per (x1,x2) pair");
        ch.transitions.reserve(nrows * ch.out_size());
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != ch.out_size())
                throw SchemaError("each row must list y1_size*y2_size*z_size probabilities");
            for (const auto& v : row) {
                if (!v.is_number()) throw SchemaError("row entries must be numbers");
                ch.transitions.push_back(v.get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("channel document malformed: ") + e.what());
    }
    ch.validate();
    return ch;
}

TwoWayChannel load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open channel file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("channel file is not valid JSON: ") + e.what());
    }
    return load_channel(doc);
}

nlohmann::json channel_to_json(const TwoWayChannel& ch) {
    nlohmann::json doc;
    doc["name"] = ch.name;
    doc["x1_size"] = ch.x1_size;
    doc["x2_size"] = ch.x2_size;
    doc["y1_size"] = ch.y1_size;
    doc["y2_size"] = ch.y2_size;
    doc["z_size"] = ch.z_size;
    nlohmann::json rows = nlohmann::json::array();
    const std::size_t nrows = static_cast<std::size_t>(ch.x1_size) * ch.x2_size;
    for (std::size_t r = 0; r < nrows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < ch.out_size(); ++k)
            row.push_back(ch.transitions[r * ch.out_size() + k]);
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

}  // namespace secrecy
