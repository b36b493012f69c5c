#pragma once

// Result artifacts: schema-versioned CSV files, JSON sidecars, and run
// manifests. Every file embeds the config hash and master seed; reruns
// with the same manifest are byte-identical (timestamps live only in the
// manifest).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "exit_chart.hpp"
#include "sim.hpp"

namespace pnc {

inline std::string config_hash(const nlohmann::json& config) {
    return hash_hex(config.dump());  // nlohmann objects serialize key-sorted
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << body;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// ---- EXIT artifacts -------------------------------------------------------

inline std::string characteristic_csv(const DetectorCharacteristic& det,
                                      const std::string& cfg_hash) {
    std::ostringstream out;
    out << "# schema=exit-characteristic.v1 config=" << cfg_hash << " seed=" << det.seed << "\n";
    out << "k,i_a,i_e\n";
    for (std::size_t k = 0; k < det.apriori_mi.size(); ++k)
        out << k << ',' << format_double(det.apriori_mi[k]) << ','
            << format_double(det.extrinsic_mi[k]) << "\n";
    return out.str();
}

inline nlohmann::json characteristic_sidecar(const DetectorCharacteristic& det,
                                             const nlohmann::json& config,
                                             const std::string& cfg_hash) {
    nlohmann::json j;
    j["f"] = {det.fit[0], det.fit[1], det.fit[2], det.fit[3]};
    j["fit_rms"] = det.fit_rms;
    j["snr_db"] = det.snr_db;
    j["mod_order"] = det.mod_order;
    j["csi"] = to_string(det.csi);
    j["frame_bits"] = det.frame_bits;
    j["seed"] = det.seed;
    j["config"] = config;
    j["config_hash"] = cfg_hash;
    return j;
}

inline std::string curve_csv(const ExitCurve& curve, const std::string& name,
                             const std::string& cfg_hash, std::uint64_t seed) {
    std::ostringstream out;
    out << "# schema=exit-curve.v1 name=" << name << " config=" << cfg_hash
        << " seed=" << seed << "\n";
    out << "k,i_a,i_e\n";
    for (std::size_t k = 0; k < curve.abscissa.size(); ++k)
        out << k << ',' << format_double(curve.abscissa[k]) << ','
            << format_double(curve.ordinate[k]) << "\n";
    return out.str();
}

inline nlohmann::json threshold_to_json(const ThresholdResult& res,
                                        const nlohmann::json& config,
                                        const std::string& cfg_hash) {
    nlohmann::json j;
    j["distribution"] = distribution_to_json(res.distribution);
    j["found"] = res.found;
    if (res.found) j["threshold_db"] = res.threshold_db;
    j["grid_step_db"] = res.grid_step;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& [snr, open] : res.verdicts) j["verdicts"].push_back({snr, open});
    j["config"] = config;
    j["config_hash"] = cfg_hash;
    return j;
}

// ---- BER sweep ------------------------------------------------------------

inline std::string ber_csv(const std::vector<ResultRecord>& records,
                           const std::string& cfg_hash) {
    std::ostringstream out;
    out << "# schema=ber-sweep.v1 config=" << cfg_hash << "\n";
    out << "snr_db,frames,bit_errors,ber,frame_errors,fer,seed\n";
    for (const auto& r : records)
        out << format_double(r.snr_db) << ',' << r.frames << ',' << r.bit_errors << ','
            << format_double(r.ber) << ',' << r.frame_errors << ',' << format_double(r.fer)
            << ',' << r.seed << "\n";
    return out.str();
}

// Reads rows back for resuming a partially completed sweep. Unknown schema
// versions are rejected; wall time is not persisted in the CSV.
inline std::vector<ResultRecord> read_ber_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<ResultRecord> out;
    bool schema_seen = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("schema=ber-sweep.v1") == std::string::npos)
                throw std::runtime_error("unsupported results schema in " + path);
            schema_seen = true;
            continue;
        }
        if (line.rfind("snr_db,", 0) == 0) continue;
        std::istringstream ss(line);
        ResultRecord r;
        char comma;
        if (!(ss >> r.snr_db >> comma >> r.frames >> comma >> r.bit_errors >> comma >> r.ber >>
              comma >> r.frame_errors >> comma >> r.fer >> comma >> r.seed))
            throw std::runtime_error("malformed results row in " + path + ": " + line);
        out.push_back(r);
    }
    if (!schema_seen) throw std::runtime_error("missing schema header in " + path);
    return out;
}

// ---- Manifest ---------------------------------------------------------------

inline nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config,
                                    const std::string& cfg_hash, std::uint64_t seed,
                                    const std::string& out_dir) {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["config_hash"] = cfg_hash;
    j["seed"] = seed;
    j["output_dir"] = out_dir;
    j["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    return j;
}

}  // namespace pnc
