// pnc - command line front end for the code design and simulation toolkit.
//
// Subcommands:
//   gen-code  realize an eIRA parity-check matrix from a degree
//             distribution (or base standard + free degrees) and save it
//             as an alist file
//   exit      measure detector characteristics and run the EXIT threshold
//             scan for one distribution
//   optimize  rank all feasible free-degree pairs of a base standard by
//             EXIT threshold
//   ber       Monte Carlo network-coded BER/FER sweep
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnc/pnc.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

const json& require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError("missing config field \"" + field + "\"");
    return j.at(field);
}

template <class T>
T get_or(const json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("bad value for config field \"" + field + "\"");
    }
}

// Runs the config-resolution phase; anything thrown there is a config error.
template <class F>
auto resolving(F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    bool dry_run = false;
    std::int64_t seed_override = -1;
    int workers_override = -1;
    std::string csi_override, feedback_override;
    int mod_order_override = 0;
    std::vector<double> snr_override;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("-c,--config", flags.config_path, "JSON config file")->required();
    cmd->add_option("-o,--out", flags.out_dir, "output directory");
    cmd->add_flag("--dry-run", flags.dry_run, "print the resolved config and write nothing");
    cmd->add_option("--seed", flags.seed_override, "override master seed");
    cmd->add_option("--workers", flags.workers_override, "cap worker threads");
    cmd->add_option("--csi", flags.csi_override, "override CSI mode (full|partial|none)");
    cmd->add_option("--feedback", flags.feedback_override, "override feedback mode (bicm|bicm-id)");
    cmd->add_option("--mod-order", flags.mod_order_override, "override modulation order");
    cmd->add_option("--snr", flags.snr_override, "override SNR list (dB)")->delimiter(',');
}

json apply_overrides(json cfg, const CommonFlags& flags) {
    if (flags.seed_override >= 0) cfg["seed"] = std::uint64_t(flags.seed_override);
    if (flags.workers_override >= 0) cfg["workers"] = flags.workers_override;
    if (!flags.csi_override.empty()) cfg["csi"] = flags.csi_override;
    if (!flags.feedback_override.empty()) cfg["feedback"] = flags.feedback_override;
    if (flags.mod_order_override > 0) cfg["mod_order"] = flags.mod_order_override;
    if (!flags.snr_override.empty()) cfg["snr_db"] = flags.snr_override;
    return cfg;
}

fs::path prepare_out_dir(const CommonFlags& flags) {
    fs::path dir(flags.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const json& cfg,
                    const std::string& hash, std::uint64_t seed) {
    pnc::write_json_file((dir / "manifest.json").string(),
                         pnc::make_manifest(subcommand, cfg, hash, seed, dir.string()));
}

pnc::DegreeDistribution resolve_distribution(const json& cfg) {
    if (cfg.contains("distribution")) {
        const auto& d = cfg.at("distribution");
        if (d.is_string()) {
            std::ifstream f(d.get<std::string>());
            if (!f) throw ConfigError("cannot open distribution file " + d.get<std::string>());
            json dj;
            f >> dj;
            return pnc::distribution_from_json(dj);
        }
        try {
            return pnc::distribution_from_json(d);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    if (cfg.contains("base")) {
        const auto& base = pnc::base_standard(require(cfg, "base").get<std::string>());
        const auto degrees = require(cfg, "free_degrees");
        if (!degrees.is_array() || degrees.size() != 2)
            throw ConfigError("config field \"free_degrees\" must hold two degrees");
        const int da = degrees.at(0).get<int>(), db = degrees.at(1).get<int>();
        const auto sol = pnc::solve_free_counts(base.fixed, da, db, base.block_length,
                                                base.info_length, base.check_degree);
        if (!sol.feasible)
            throw ConfigError("free degrees (" + std::to_string(da) + ", " + std::to_string(db) +
                              ") are infeasible for base " + base.name);
        return base.with_free(da, sol.count_a, db, sol.count_b);
    }
    throw ConfigError("missing config field \"distribution\" (or \"base\" + \"free_degrees\")");
}

pnc::ExitConfig resolve_exit_config(const json& cfg, const pnc::DegreeDistribution* dist) {
    pnc::ExitConfig ec;
    ec.mod_order = get_or<int>(cfg, "mod_order", 4);
    ec.csi = pnc::csi_from_string(get_or<std::string>(cfg, "csi", "partial"));
    if (dist)
        ec.code_rate = double(dist->info_length) / double(dist->block_length);
    ec.code_rate = get_or<double>(cfg, "rate", ec.code_rate);
    if (ec.code_rate <= 0.0) throw ConfigError("missing config field \"rate\"");
    ec.noise_convention =
        pnc::noise_convention_from_string(get_or<std::string>(cfg, "n0_convention", "log2m"));
    ec.partial_same_tone =
        pnc::partial_same_tone_from_string(get_or<std::string>(cfg, "partial_same_tone", "combined"));
    ec.frame_bits = get_or<int>(cfg, "frame_bits", dist ? int(dist->block_length) : 0);
    if (ec.frame_bits <= 0) throw ConfigError("missing config field \"frame_bits\"");
    ec.frames_per_point = get_or<int>(cfg, "frames_per_point", 0);
    ec.grid_size = get_or<int>(cfg, "grid_size", pnc::kExitGridSize);
    ec.phase_nodes = get_or<int>(cfg, "phase_nodes", pnc::kPhaseNodes);
    ec.seed = get_or<std::uint64_t>(cfg, "seed", 1);
    ec.workers = get_or<int>(cfg, "workers", 0);
    return ec;
}

pnc::SnrGrid resolve_snr_grid(const json& cfg) {
    pnc::SnrGrid grid;
    grid.lo_db = require(cfg, "snr_lo").get<double>();
    grid.hi_db = require(cfg, "snr_hi").get<double>();
    grid.step_db = get_or<double>(cfg, "snr_step", 0.1);
    if (grid.step_db <= 0.0) throw ConfigError("config field \"snr_step\" must be positive");
    return grid;
}

int cmd_gen_code(const CommonFlags& flags) {
    const json cfg = apply_overrides(load_config(flags.config_path), flags);
    const auto dist = resolving([&] { return resolve_distribution(cfg); });
    const auto seed = get_or<std::uint64_t>(cfg, "seed", 1);
    const auto name = get_or<std::string>(cfg, "name", "code");

    const auto report = pnc::validate_distribution(dist);
    std::cout << "distribution " << dist.label() << "\n"
              << "  node sum      " << report.node_sum << " / " << dist.block_length << "  "
              << (report.node_sum_ok ? "ok" : "FAIL") << "\n"
              << "  edge balance  e_v=" << report.variable_edges << " e_c=" << report.check_edges
              << "  " << (report.edge_balance_ok ? "ok" : "FAIL") << "\n";
    if (report.degree_one_present)
        std::cout << "  note: degree-1 variable nodes present (no iterative gain)\n";
    if (!report.valid()) throw ConfigError("distribution fails validation");

    if (flags.dry_run) {
        std::cout << cfg.dump(2) << "\n";
        return 0;
    }
    const auto dir = prepare_out_dir(flags);
    const auto hash = pnc::config_hash(cfg);
    const auto h = pnc::realize_matrix(dist, seed);
    pnc::save_alist(h, (dir / (name + ".alist")).string());
    pnc::write_json_file((dir / (name + ".distribution.json")).string(),
                         pnc::distribution_to_json(dist));
    write_manifest(dir, "gen-code", cfg, hash, seed);
    std::cout << "wrote " << (dir / (name + ".alist")).string() << " (" << h.rows() << "x"
              << h.cols() << ", " << h.edge_count() << " edges)\n";
    return 0;
}

int cmd_exit(const CommonFlags& flags) {
    json cfg = apply_overrides(load_config(flags.config_path), flags);
    const auto dist = resolving([&] { return resolve_distribution(cfg); });
    const auto ec = resolving([&] { return resolve_exit_config(cfg, &dist); });
    const auto grid = resolving([&] { return resolve_snr_grid(cfg); });
    if (flags.dry_run) {
        std::cout << cfg.dump(2) << "\n";
        return 0;
    }
    const auto dir = prepare_out_dir(flags);
    const auto hash = pnc::config_hash(cfg);

    auto cache = pnc::CharacteristicCache::measured(ec);
    const auto res = pnc::exit_threshold(dist, grid, cache, get_or<bool>(cfg, "full_scan", false),
                                         ec.grid_size);
    pnc::write_json_file((dir / "threshold.json").string(),
                         pnc::threshold_to_json(res, cfg, hash));

    const double report_snr = res.found ? res.threshold_db : grid.hi_db;
    const auto& det = cache.at(report_snr);
    pnc::write_text_file((dir / "characteristic.csv").string(),
                         pnc::characteristic_csv(det, hash));
    pnc::write_json_file((dir / "characteristic.json").string(),
                         pnc::characteristic_sidecar(det, cfg, hash));
    pnc::write_text_file((dir / "vnd_curve.csv").string(),
                         pnc::curve_csv(pnc::vnd_curve(dist, det, ec.grid_size), "vnd", hash, ec.seed));
    pnc::write_text_file(
        (dir / "cnd_curve.csv").string(),
        pnc::curve_csv(pnc::cnd_apriori_curve(dist.check_degree, ec.grid_size), "cnd-required",
                       hash, ec.seed));
    write_manifest(dir, "exit", cfg, hash, ec.seed);

    if (res.found)
        std::cout << "threshold " << res.threshold_db << " dB for " << dist.label() << "\n";
    else
        std::cout << "no open tunnel in [" << grid.lo_db << ", " << grid.hi_db << "] dB for "
                  << dist.label() << "\n";
    return 0;
}

int cmd_optimize(const CommonFlags& flags) {
    json cfg = apply_overrides(load_config(flags.config_path), flags);
    const auto& base = resolving(
        [&]() -> const pnc::BaseStandard& { return pnc::base_standard(require(cfg, "base").get<std::string>()); });
    auto probe = base.standard_distribution();
    const auto ec = resolving([&] { return resolve_exit_config(cfg, &probe); });
    const auto grid = resolving([&] { return resolve_snr_grid(cfg); });
    const auto top_n = get_or<std::size_t>(cfg, "top_n", 10);
    if (flags.dry_run) {
        std::cout << cfg.dump(2) << "\n";
        return 0;
    }
    const auto dir = prepare_out_dir(flags);
    const auto hash = pnc::config_hash(cfg);

    auto cache = pnc::CharacteristicCache::measured(ec);
    const auto ranked = pnc::optimize_degrees(base, grid, cache, ec.grid_size);

    json list = json::array();
    std::ostringstream csv;
    csv << "# schema=threshold-table.v1 config=" << hash << "\n";
    csv << "rank,threshold_db,distribution\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        list.push_back(pnc::threshold_to_json(ranked[i], json::object(), hash));
        csv << (i + 1) << ',' << (ranked[i].found ? pnc::format_double(ranked[i].threshold_db) : "-")
            << ",\"" << ranked[i].distribution.label() << "\"\n";
    }
    json out;
    out["config"] = cfg;
    out["config_hash"] = hash;
    out["results"] = list;
    pnc::write_json_file((dir / "thresholds.json").string(), out);
    pnc::write_text_file((dir / "thresholds.csv").string(), csv.str());
    write_manifest(dir, "optimize", cfg, hash, ec.seed);

    std::cout << "feasible distributions: " << ranked.size() << "\n";
    for (std::size_t i = 0; i < ranked.size() && i < top_n; ++i) {
        std::cout << "  #" << (i + 1) << "  ";
        if (ranked[i].found)
            std::cout << ranked[i].threshold_db << " dB  ";
        else
            std::cout << "(closed in range)  ";
        std::cout << ranked[i].distribution.label() << "\n";
    }
    return 0;
}

int cmd_ber(const CommonFlags& flags) {
    json cfg = apply_overrides(load_config(flags.config_path), flags);
    const auto& code = require(cfg, "code");

    const pnc::ParityCheckMatrix h = resolving([&] {
        if (code.contains("alist")) return pnc::load_alist(code.at("alist").get<std::string>());
        const auto dist = resolve_distribution(code);
        return pnc::realize_matrix(dist, get_or<std::uint64_t>(code, "seed", 1));
    });

    pnc::TrialConfig tc;
    resolving([&] {
        tc.mod_order = get_or<int>(cfg, "mod_order", 4);
        tc.csi = pnc::csi_from_string(get_or<std::string>(cfg, "csi", "partial"));
        tc.feedback = pnc::feedback_from_string(get_or<std::string>(cfg, "feedback", "bicm-id"));
        tc.noise_convention =
            pnc::noise_convention_from_string(get_or<std::string>(cfg, "n0_convention", "log2m"));
        tc.partial_same_tone = pnc::partial_same_tone_from_string(
            get_or<std::string>(cfg, "partial_same_tone", "combined"));
        tc.snr_db = require(cfg, "snr_db").get<std::vector<double>>();
        if (tc.snr_db.empty()) throw ConfigError("config field \"snr_db\" must be nonempty");
        return 0;
    });
    tc.max_frames = get_or<long long>(cfg, "max_frames", 1000000);
    tc.max_frame_errors = get_or<long long>(cfg, "max_frame_errors", 100);
    tc.max_bit_errors = get_or<long long>(cfg, "max_bit_errors", 0);
    tc.iterations = get_or<int>(cfg, "iterations", 100);
    tc.phase_nodes = get_or<int>(cfg, "phase_nodes", pnc::kPhaseNodes);
    tc.master_seed = get_or<std::uint64_t>(cfg, "seed", 1);
    tc.workers = get_or<int>(cfg, "workers", 0);

    if (flags.dry_run) {
        std::cout << cfg.dump(2) << "\n";
        return 0;
    }
    const auto dir = prepare_out_dir(flags);
    const auto hash = pnc::config_hash(cfg);
    const auto csv_path = dir / "ber.csv";

    // Resume: keep rows for SNRs already in a previous partial file.
    std::vector<pnc::ResultRecord> existing;
    if (fs::exists(csv_path)) existing = pnc::read_ber_csv(csv_path.string());
    auto find_existing = [&existing](double snr) -> const pnc::ResultRecord* {
        for (const auto& r : existing)
            if (std::llround(r.snr_db * 1000.0) == std::llround(snr * 1000.0)) return &r;
        return nullptr;
    };

    std::vector<pnc::ResultRecord> records;
    for (double snr : tc.snr_db) {
        if (const auto* old = find_existing(snr)) {
            records.push_back(*old);
            std::cout << "snr " << snr << " dB: kept existing row\n";
            continue;
        }
        auto rec = pnc::run_point(h, tc, snr);
        std::cout << "snr " << snr << " dB: frames " << rec.frames << "  ber "
                  << pnc::format_double(rec.ber) << "  fer " << pnc::format_double(rec.fer)
                  << "  (" << pnc::format_double(rec.wall_seconds) << " s)\n";
        records.push_back(rec);
        pnc::write_text_file(csv_path.string(), pnc::ber_csv(records, hash));  // checkpoint
    }
    pnc::write_text_file(csv_path.string(), pnc::ber_csv(records, hash));

    json out;
    out["config"] = cfg;
    out["config_hash"] = hash;
    out["records"] = json::array();
    for (const auto& r : records) {
        json rj;
        rj["snr_db"] = r.snr_db;
        rj["frames"] = r.frames;
        rj["bit_errors"] = r.bit_errors;
        rj["ber"] = r.ber;
        rj["frame_errors"] = r.frame_errors;
        rj["fer"] = r.fer;
        rj["wall_seconds"] = r.wall_seconds;
        rj["seed"] = r.seed;
        out["records"].push_back(rj);
    }
    pnc::write_json_file((dir / "results.json").string(), out);
    write_manifest(dir, "ber", cfg, hash, tc.master_seed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC code design and relay-receiver simulation toolkit"};
    app.require_subcommand(1);

    CommonFlags gen_flags, exit_flags, opt_flags, ber_flags;
    auto* gen = app.add_subcommand("gen-code", "realize a parity-check matrix");
    add_common_flags(gen, gen_flags);
    auto* exit_cmd = app.add_subcommand("exit", "EXIT curves and threshold for one distribution");
    add_common_flags(exit_cmd, exit_flags);
    auto* opt = app.add_subcommand("optimize", "rank feasible degree distributions by threshold");
    add_common_flags(opt, opt_flags);
    auto* ber = app.add_subcommand("ber", "Monte Carlo BER/FER sweep");
    add_common_flags(ber, ber_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_code(gen_flags);
        if (exit_cmd->parsed()) return cmd_exit(exit_flags);
        if (opt->parsed()) return cmd_optimize(opt_flags);
        if (ber->parsed()) return cmd_ber(ber_flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
