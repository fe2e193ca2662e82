// Command-line front end: channel listing, rate-region sweeps, block-Markov
// simulation. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secrecy/channel.hpp"
#include "secrecy/errors.hpp"
#include "secrecy/rate_regions.hpp"
#include "secrecy/sim.hpp"

namespace {

using namespace secrecy;

TwoWayChannel resolve_channel(const std::string& ref) {
    if (ref == "bmc" || ref == "xor" || ref == "adder") return builtin_channel(ref);
    if (!std::filesystem::exists(ref))
        throw ValidationError("channel reference is neither a builtin nor a file: " + ref);
    return load_channel_file(ref);
}

void emit(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + out_path);
    out << payload;
}

std::string channels_text() {
    std::ostringstream os;
    for (const auto& name : {"bmc", "xor", "adder"}) {
        const TwoWayChannel ch = builtin_channel(name);
        os << ch.name << ": x1,x2 in {0..1}, outputs y1=y2=z in {0.." << ch.z_size - 1 << "}\n";
        for (int x1 = 0; x1 < ch.x1_size; ++x1)
            for (int x2 = 0; x2 < ch.x2_size; ++x2)
                for (int z = 0; z < ch.z_size; ++z)
                    if (ch.p(x1, x2, z, z, z) == 1.0)
                        os << "  (x1=" << x1 << ", x2=" << x2 << ") -> " << z << "\n";
    }
    return os.str();
}

int cmd_channels(const std::string& format, const std::string& out_path) {
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& name : {"bmc", "xor", "adder"})
            arr.push_back(channel_to_json(builtin_channel(name)));
        emit(out_path, arr.dump(2) + "\n");
    } else {
        emit(out_path, channels_text());
    }
    return 0;
}

std::vector<RegionKind> kinds_of(const std::string& kind) {
    if (kind == "inner") return {RegionKind::inner_feedback};
    if (kind == "nofeedback") return {RegionKind::inner_nofeedback};
    if (kind == "outer") return {RegionKind::outer};
    if (kind == "all")
        return {RegionKind::inner_feedback, RegionKind::inner_nofeedback, RegionKind::outer};
    throw ValidationError("unknown --kind value: " + kind);
}

int cmd_region(const std::string& channel_ref, const std::string& kind, double step, int q_card,
               double prefix_grid, const std::string& out_path, const std::string& format) {
    const TwoWayChannel ch = resolve_channel(channel_ref);
    GridSpec grid;
    grid.step = step;
    grid.q_card = q_card;
    grid.prefix_step = prefix_grid;
    std::vector<RateRegion> regions;
    for (RegionKind k : kinds_of(kind)) regions.push_back(sweep(ch, grid, k));
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : regions) arr.push_back(region_to_json(r));
        emit(out_path, arr.dump(2) + "\n");
    } else {
        std::ostringstream os;
        write_region_csv(os, regions);
        emit(out_path, os.str());
    }
    return 0;
}

void apply_config_file(SimConfig& cfg, double& p1, double& p2, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("config file is not valid JSON: ") + e.what());
    }
    cfg.n = doc.value("n", cfg.n);
    cfg.b = doc.value("b", cfg.b);
    if (doc.contains("rates")) {
        const auto& r = doc["rates"];
        cfg.r1u = r.value("r1u", cfg.r1u);
        cfg.r1s = r.value("r1s", cfg.r1s);
        cfg.r1x = r.value("r1x", cfg.r1x);
        cfg.r2 = r.value("r2", cfg.r2);
        cfg.r2k = r.value("r2k", cfg.r2k);
        cfg.r2x = r.value("r2x", cfg.r2x);
    }
    cfg.epsilon = doc.value("epsilon", cfg.epsilon);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.trials = doc.value("trials", cfg.trials);
    cfg.cap_exponent = doc.value("cap", cfg.cap_exponent);
    p1 = doc.value("p1", p1);
    p2 = doc.value("p2", p2);
}

int cmd_simulate(const std::string& channel_ref, const SimConfig& cfg_in, double p1, double p2,
                 const std::string& out_path) {
    const TwoWayChannel ch = resolve_channel(channel_ref);
    SimConfig cfg = cfg_in;
    if (ch.x1_size == 2 && ch.x2_size == 2) {
        cfg.policy = InputPolicy::iid_binary(p1, p2);
    } else {
        if (p1 != 0.5 || p2 != 0.5)
            throw ValidationError("--p1/--p2 apply to binary-input channels only");
        std::vector<double> m1(ch.x1_size, 1.0 / ch.x1_size);
        std::vector<double> m2(ch.x2_size, 1.0 / ch.x2_size);
        cfg.policy = InputPolicy::iid(m1, m2);
    }
    const SimReport rep = run_experiment(ch, cfg);
    emit(out_path, report_to_json(rep, cfg, ch.name).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-sided-secrecy rate regions and block-Markov coding simulator"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string out_path;

    auto* channels = app.add_subcommand("channels", "list builtin channels");
    std::string ch_format = "text";
    channels->add_option("--format", ch_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    channels->add_option("--out", out_path, "output file (default stdout)");

    auto* region = app.add_subcommand("region", "sweep achievable regions and outer bounds");
    std::string region_channel, kind = "all";
    double step = 0.02, prefix_grid = 0.0;
    int q_card = 1;
    bool compare = false;
    region->add_option("channel", region_channel, "builtin name or channel JSON file")->required();
    region->add_option("--kind", kind, "inner | nofeedback | outer | all")
        ->check(CLI::IsMember({"inner", "nofeedback", "outer", "all"}));
    region->add_option("--step", step, "marginal grid step (0, 0.5]");
    region->add_option("--q-card", q_card, "time-sharing cardinality, 1 or 2")
        ->check(CLI::IsMember({1, 2}));
    region->add_option("--prefix-grid", prefix_grid, "crossover step for binary prefix channels");
    region->add_flag("--compare", compare, "emit all three curves keyed by label");
    region->add_option("--out", out_path, "output file (default stdout)");
    region->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* simulate = app.add_subcommand("simulate", "run the block-Markov coding experiment");
    std::string sim_channel, rates_csv, config_path;
    SimConfig cfg;
    double p1 = 0.5, p2 = 0.5;
    simulate->add_option("channel", sim_channel, "builtin name or channel JSON file")->required();
    simulate->add_option("--config", config_path, "JSON config file");
    simulate->add_option("--n", cfg.n, "block length");
    simulate->add_option("--b", cfg.b, "number of blocks (>= 2)");
    simulate->add_option("--rates", rates_csv, "r1u,r1s,r1x,r2,r2k,r2x in bits/use");
    simulate->add_option("--epsilon", cfg.epsilon, "typicality slack");
    simulate->add_option("--trials", cfg.trials, "Monte Carlo trials");
    simulate->add_option("--seed", cfg.seed, "64-bit seed");
    simulate->add_option("--cap", cfg.cap_exponent, "enumeration cap exponent");
    simulate->add_option("--p1", p1, "user 1 input bias (binary channels)");
    simulate->add_option("--p2", p2, "user 2 input bias (binary channels)");
    simulate->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (channels->parsed()) return cmd_channels(ch_format, out_path);
        if (region->parsed()) {
            if (compare) kind = "all";
            return cmd_region(region_channel, kind, step, q_card, prefix_grid, out_path, format);
        }
        if (simulate->parsed()) {
            if (!config_path.empty()) apply_config_file(cfg, p1, p2, config_path);
            if (!rates_csv.empty()) {
                std::istringstream is(rates_csv);
                std::string tok;
                std::vector<double> vals;
                while (std::getline(is, tok, ',')) vals.push_back(std::stod(tok));
                if (vals.size() != 6)
                    throw ValidationError("--rates expects six comma-separated values");
                cfg.r1u = vals[0];
                cfg.r1s = vals[1];
                cfg.r1x = vals[2];
                cfg.r2 = vals[3];
                cfg.r2k = vals[4];
                cfg.r2x = vals[5];
            }
            return cmd_simulate(sim_channel, cfg, p1, p2, out_path);
        }
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\nhint: reduce --n, --b or the rates, or raise --cap\n";
        return 1;
    } catch (const CapacityOverflow& e) {
        std::cerr << "error: " << e.what() << "\nhint: reduce --n, --b or the rates, or raise --cap\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
