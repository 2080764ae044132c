#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "siq/model.hpp"

namespace siq {

inline constexpr const char* kToolVersion = "siq 1.0.0";

// 9 significant digits, '.' decimal separator regardless of the global locale.
std::string format_number(double v);
// Strict parse of a whole string as a double; nullopt on trailing garbage.
std::optional<double> parse_number(const std::string& s);

// CSV with a block of "# key = value" metadata lines before the header.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_meta(const std::string& key, const std::string& value);
    void add_meta(const std::string& key, double value);
    void add_row(const std::vector<double>& values);
    std::optional<std::string> meta_value(const std::string& key) const;
    std::size_t column_index(const std::string& name) const;  // throws FileParse
    std::vector<double> column(const std::string& name) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

// Records r, p, tau, kappa, sigma, eps, step and the tool version.
void add_param_meta(CsvTable& table, const ModelParams& params, double step);

struct ScenarioConfig {
    ModelParams params;
    double i0 = 0.001;
    double q0 = 0.0;
    double e0 = 0.0;
    double t_end = 200.0;
    double step = kDefaultStep;
    std::string out;  // empty: standard output
};

// Flat "key = value" lines; '#' starts a comment. Keys: r, p, tau, kappa, sigma, i0, q0, e0,
// t_end, step, out. Unknown keys, repeated keys and malformed values throw ConfigError naming
// the key.
ScenarioConfig parse_config(std::istream& is, ScenarioConfig base = {});
ScenarioConfig parse_config_file(const std::string& path, ScenarioConfig base = {});
// Applies one key/value pair with the same rules as the file parser.
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

std::vector<DiseaseSpec> read_disease_table(const std::string& path);

struct DiseaseReference {
    double p = 0.0;
    double p_c = 0.0;
    double T_c_days = 0.0;
};

// Header name,p,p_c_ref,T_c_ref_days.
std::map<std::string, DiseaseReference> read_reference_table(const std::string& path);

}  // namespace siq
