#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "pesinlab/config.hpp"
#include "pesinlab/entropy.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

// One experiment run: a JSON summary plus zero or more plot-ready CSV tables.
// Output files carry no timestamps; identical (config, seed) reruns are
// byte-identical regardless of worker count.
struct LabReport {
  std::string experiment;
  nlohmann::ordered_json summary;
  std::vector<CsvTable> tables;
};

LabReport cmd_validate(const LabConfig& cfg);
LabReport cmd_cantor_report(const LabConfig& cfg);
LabReport cmd_pesin_check(const LabConfig& cfg);
LabReport cmd_basin_scan(const LabConfig& cfg);
LabReport cmd_decay_rate(const LabConfig& cfg);
LabReport cmd_distortion(const LabConfig& cfg);

// Writes <experiment>.json and the CSV tables under out_dir, honoring the
// csv/json/both format switch. Returns the list of files written.
std::vector<std::string> write_report(const LabReport& rep, const std::string& out_dir,
                                      const std::string& format);

nlohmann::ordered_json pesin_report_json(const PesinReport& rep);

}  // namespace pesinlab
