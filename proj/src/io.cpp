#include "siq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <set>
#include <sstream>

#include "siq/errors.hpp"

namespace siq {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(9) << v;
    return os.str();
}

std::optional<double> parse_number(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::nullopt;
    const auto e = s.find_last_not_of(" \t\r");
    const std::string t = s.substr(b, e - b + 1);
    if (t == "nan") return std::nan("");
    if (t == "inf" || t == "+inf") return HUGE_VAL;
    if (t == "-inf") return -HUGE_VAL;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

void CsvTable::add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }

void CsvTable::add_meta(const std::string& key, double value) { meta.emplace_back(key, format_number(value)); }

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    rows.push_back(std::move(row));
}

std::optional<std::string> CsvTable::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw FileParse("no column named '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto v = parse_number(rows[i][c]);
        if (!v) throw FileParse("row " + std::to_string(i + 1) + ", column '" + name + "': not a number");
        out.push_back(*v);
    }
    return out;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> cells;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (in_quotes) throw FileParse("line " + std::to_string(lineno) + ": unterminated quote");
    cells.push_back(std::move(cur));
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& table) {
    for (const auto& [k, v] : table.meta) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << quote(table.header[i]);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << quote(row[i]);
        os << '\n';
    }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw FileParse("cannot write " + path);
    write_csv(out, table);
    if (!out) throw FileParse("write failed for " + path);
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (!have_header && line[0] == '#') {
            const std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) {
                t.add_meta(trim(body), "");
            } else {
                t.add_meta(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
            }
            continue;
        }
        auto cells = split_csv_line(line, lineno);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw FileParse("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                            " fields, got " + std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw FileParse("missing CSV header");
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileParse("cannot open " + path);
    try {
        return read_csv(in);
    } catch (const FileParse& e) {
        throw FileParse(path + ": " + e.what());
    }
}

void add_param_meta(CsvTable& table, const ModelParams& params, double step) {
    table.add_meta("version", kToolVersion);
    table.add_meta("r", params.r);
    table.add_meta("p", params.p);
    table.add_meta("tau", params.tau);
    table.add_meta("kappa", params.kappa);
    table.add_meta("sigma", params.sigma);
    table.add_meta("eps", params.eps());
    table.add_meta("step", step);
}

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "out") {
        cfg.out = value;
        return;
    }
    double* slot = nullptr;
    if (key == "r") slot = &cfg.params.r;
    else if (key == "p") slot = &cfg.params.p;
    else if (key == "tau") slot = &cfg.params.tau;
    else if (key == "kappa") slot = &cfg.params.kappa;
    else if (key == "sigma") slot = &cfg.params.sigma;
    else if (key == "i0") slot = &cfg.i0;
    else if (key == "q0") slot = &cfg.q0;
    else if (key == "e0") slot = &cfg.e0;
    else if (key == "t_end") slot = &cfg.t_end;
    else if (key == "step") slot = &cfg.step;
    else throw ConfigError("unknown key '" + key + "'");
    const auto v = parse_number(value);
    if (!v || !std::isfinite(*v)) throw ConfigError("key '" + key + "': '" + value + "' is not a finite number");
    *slot = *v;
}

ScenarioConfig parse_config(std::istream& is, ScenarioConfig base) {
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError("key '" + key + "' given twice");
        set_config_value(base, key, value);
    }
    return base;
}

ScenarioConfig parse_config_file(const std::string& path, ScenarioConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return parse_config(in, std::move(base));
}

std::vector<DiseaseSpec> read_disease_table(const std::string& path) {
    const CsvTable t = read_csv_file(path);
    const std::size_t cn = t.column_index("name");
    const std::size_t cr = t.column_index("r");
    const std::size_t cd = t.column_index("infectious_period_days");
    const std::size_t cs = t.column_index("source");
    std::vector<DiseaseSpec> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        DiseaseSpec d;
        d.name = row[cn];
        const auto r = parse_number(row[cr]);
        const auto days = parse_number(row[cd]);
        if (!r || !days || !(*r > 0.0) || !(*days > 0.0) || !std::isfinite(*r) || !std::isfinite(*days)) {
            throw FileParse(path + ": row " + std::to_string(i + 1) + " (" + d.name +
                            "): r and infectious_period_days must be positive numbers");
        }
        d.r = *r;
        d.infectious_period_days = *days;
        d.source = row[cs];
        out.push_back(std::move(d));
    }
    return out;
}

std::map<std::string, DiseaseReference> read_reference_table(const std::string& path) {
    const CsvTable t = read_csv_file(path);
    const std::size_t cn = t.column_index("name");
    const auto p = t.column("p");
    const auto pc = t.column("p_c_ref");
    const auto tc = t.column("T_c_ref_days");
    std::map<std::string, DiseaseReference> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) out[t.rows[i][cn]] = {p[i], pc[i], tc[i]};
    return out;
}

}  // namespace siq
