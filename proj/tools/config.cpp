#include "config.hpp"

#include "fyflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fyflow::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const std::vector<KeyDef> kGridKeys = {
    {"grid.dim", KeyType::Int, "1", "torus dimension (1..3)"},
    {"grid.points", KeyType::Int, "64", "points per axis (power of two)"},
    {"grid.side", KeyType::Double, "6.2831853071795862", "side length"},
};

const std::vector<KeyDef> kParamKeys = {
    {"params.gamma", KeyType::Double, "0.5", "operator order in (0,1)"},
    {"params.n", KeyType::Int, "3", "analytic dimension, n > 2*gamma"},
    {"params.q_c", KeyType::Double, "0", "constant curvature term, >= 0"},
    {"params.h", KeyType::Double, "0.01", "time step"},
    {"params.tol_resolvent", KeyType::Double, "1e-10", "relative residual tolerance"},
    {"params.max_iter", KeyType::Int, "200", "resolvent iteration cap"},
};

const std::vector<KeyDef> kRunKeys = {
    {"run.t_end", KeyType::Double, "1", "final time"},
    {"run.record_stride", KeyType::Int, "1", "steps between trace records"},
    {"run.snapshot_stride", KeyType::Int, "0", "records between snapshots (0 = off)"},
    {"run.out_dir", KeyType::String, "fyflow_out", "output directory"},
    {"run.seed", KeyType::Int, "12345", "base seed for randomized pieces"},
    {"run.extinction_threshold", KeyType::Double, "1e-8", "sup threshold, relative"},
    {"run.adapt_near_extinction", KeyType::Bool, "true", "halve h on >20% mass drop"},
    {"run.rescale_output", KeyType::Bool, "false", "also emit the time-change rescaling"},
    {"run.mass_drift_tol", KeyType::Double, "1e-8", "mass ledger bound at q_c = 0"},
    {"run.volume_drift_tol", KeyType::Double, "1e-6", "volume ledger bound (rescaled)"},
};

const std::vector<KeyDef> kInitKeys = {
    {"init.kind", KeyType::String, "one_plus_cos",
     "constant | one_plus_cos | random_smooth | file"},
    {"init.value", KeyType::Double, "1", "base value"},
    {"init.amplitude", KeyType::Double, "0.5", "perturbation amplitude"},
    {"init.mode", KeyType::Int, "1", "cosine mode for one_plus_cos"},
    {"init.cutoff", KeyType::Int, "8", "highest random mode for random_smooth"},
    {"init.floor", KeyType::Double, "0", "clamp the field from below"},
    {"init.path", KeyType::String, "", "binary field file for kind = file"},
};

const std::vector<KeyDef> kOdeKeys = {
    {"ode.exponent", KeyType::Double, "2", "exponent N > 1"},
    {"ode.q_sign", KeyType::Int, "1", "+1 decay ODE, -1 nonuniqueness ODE"},
    {"ode.u0", KeyType::Double, "1", "initial value, >= 0"},
};

const std::vector<KeyDef> kExtensionKeys = {
    {"extension.levels", KeyType::Int, "256", "interior y-levels"},
    {"extension.beta", KeyType::Double, "2", "grading exponent"},
    {"extension.y_max", KeyType::Double, "4", "truncation height"},
    {"extension.richardson", KeyType::Bool, "true", "refined flux extraction"},
    {"extension.tol", KeyType::Double, "1e-10", "linear solve tolerance"},
    {"extension.max_iter", KeyType::Int, "5000", "linear solve iteration cap"},
    {"extension.modes", KeyType::IntList, "1:8", "tested modes"},
    {"extension.gammas", KeyType::DoubleList, "0.3,0.5,0.7", "tested orders"},
    {"extension.threshold", KeyType::Double, "0.02", "relative error bound"},
    {"extension.threshold_exact", KeyType::Double, "0.01",
     "bound at gamma = 0.5 where the closed form is exact"},
};

const std::vector<KeyDef> kDiagnosticsKeys = {
    {"diagnostics.trials", KeyType::Int, "100", "randomized trials per check"},
    {"diagnostics.checks", KeyType::String, "all",
     "all | t_contraction | stroock_varopoulos | conformal | harnack_box"},
    {"diagnostics.sv_gammas", KeyType::DoubleList, "0.3,0.7", "SV orders"},
    {"diagnostics.sv_q", KeyType::DoubleList, "1.5,2,3", "SV exponents"},
    {"diagnostics.tc_tolerance", KeyType::Double, "1e-8", "T-contraction slack"},
    {"diagnostics.harnack_bound", KeyType::Double, "2", "box ratio bound"},
    {"diagnostics.harnack_comparability", KeyType::Double, "1.2",
     "allowed factor between the two scales"},
    {"diagnostics.box_nodes_x", KeyType::Int, "65", "box resolution in x"},
    {"diagnostics.box_nodes_y", KeyType::Int, "33", "box resolution in y"},
};

void append(std::vector<KeyDef>& out, const std::vector<KeyDef>& in) {
    out.insert(out.end(), in.begin(), in.end());
}

const std::map<std::string, std::vector<KeyDef>>& schemas() {
    static const std::map<std::string, std::vector<KeyDef>> s = [] {
        std::map<std::string, std::vector<KeyDef>> m;
        auto common = [] {
            std::vector<KeyDef> v;
            append(v, kGridKeys);
            append(v, kParamKeys);
            append(v, kRunKeys);
            return v;
        };
        {
            auto v = common();
            append(v, kInitKeys);
            m["flow-unrescaled"] = v;
            m["flow-rescaled"] = v;
            m["resolvent"] = v;
        }
        {
            auto v = common();
            append(v, kOdeKeys);
            m["ode"] = v;
        }
        {
            auto v = common();
            append(v, kExtensionKeys);
            m["extension-check"] = v;
        }
        {
            auto v = common();
            append(v, kDiagnosticsKeys);
            m["diagnostics"] = v;
        }
        return m;
    }();
    return s;
}

double parse_double(const std::string& key, const std::string& raw) {
    try {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key \"" + key + "\": cannot parse \"" + raw + "\" as a number",
                          key);
    }
}

int parse_int(const std::string& key, const std::string& raw) {
    try {
        std::size_t pos = 0;
        long v = std::stol(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("key \"" + key + "\": cannot parse \"" + raw + "\" as an integer",
                          key);
    }
}

bool parse_bool(const std::string& key, const std::string& raw) {
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    throw ConfigError("key \"" + key + "\": cannot parse \"" + raw + "\" as a boolean", key);
}

std::vector<std::string> split_commas(const std::string& raw) {
    std::vector<std::string> items;
    std::string cur;
    std::stringstream ss(raw);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) items.push_back(cur);
    }
    return items;
}

} // namespace

const std::vector<std::string>& RunConfig::commands() {
    static const std::vector<std::string> c = {"flow-unrescaled", "flow-rescaled", "ode",
                                               "resolvent", "extension-check",
                                               "diagnostics"};
    return c;
}

const std::vector<KeyDef>& RunConfig::schema(const std::string& command) {
    auto it = schemas().find(command);
    if (it == schemas().end())
        throw ConfigError("unknown command \"" + command + "\"");
    return it->second;
}

RunConfig::RunConfig(std::string command, std::map<std::string, std::string> values)
    : command_(std::move(command)), values_(std::move(values)) {}

RunConfig RunConfig::load(const std::string& command, const std::string& config_path,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
    const auto& defs = schema(command);
    std::map<std::string, std::string> values;
    for (const auto& d : defs) values[d.name] = d.default_value;

    auto known = [&](const std::string& key) {
        return std::any_of(defs.begin(), defs.end(),
                           [&](const KeyDef& d) { return d.name == key; });
    };
    if (!config_path.empty()) {
        for (const auto& [key, value] : parse_config_file(config_path)) {
            if (!known(key)) throw ConfigError("unknown key \"" + key + "\"", key);
            values[key] = value;
        }
    }
    for (const auto& [key, value] : overrides) {
        if (!known(key)) throw ConfigError("unknown key \"" + key + "\"", key);
        values[key] = value;
    }

    RunConfig cfg(command, std::move(values));
    cfg.validate();
    return cfg;
}

const std::string& RunConfig::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key \"" + key + "\"", key);
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    return parse_double(key, raw(key));
}
int RunConfig::get_int(const std::string& key) const { return parse_int(key, raw(key)); }
bool RunConfig::get_bool(const std::string& key) const { return parse_bool(key, raw(key)); }
const std::string& RunConfig::get_string(const std::string& key) const { return raw(key); }

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_commas(raw(key))) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const auto& item : split_commas(raw(key))) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(parse_int(key, item));
        } else {
            const int a = parse_int(key, item.substr(0, colon));
            const int b = parse_int(key, item.substr(colon + 1));
            if (b < a) throw ConfigError("key \"" + key + "\": empty range " + item, key);
            for (int v = a; v <= b; ++v) out.push_back(v);
        }
    }
    return out;
}

void RunConfig::validate() const {
    // Type checks for everything first, so misspelled values fail before work.
    for (const auto& d : schema(command_)) {
        switch (d.type) {
            case KeyType::Double: get_double(d.name); break;
            case KeyType::Int: get_int(d.name); break;
            case KeyType::Bool: get_bool(d.name); break;
            case KeyType::String: break;
            case KeyType::DoubleList: get_double_list(d.name); break;
            case KeyType::IntList: get_int_list(d.name); break;
        }
    }

    auto fail = [](const std::string& msg, const std::string& key) {
        throw ConfigError(msg, key);
    };

    const int dim = get_int("grid.dim");
    if (dim < 1 || dim > 3) fail("grid.dim must be 1, 2 or 3", "grid.dim");
    const int pts = get_int("grid.points");
    if (pts < 2 || (pts & (pts - 1)) != 0)
        fail("grid.points must be a power of two >= 2", "grid.points");
    if (!(get_double("grid.side") > 0)) fail("grid.side must be positive", "grid.side");

    const double gamma = get_double("params.gamma");
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)", "params.gamma");
    const int n = get_int("params.n");
    if (n < 1) fail("params.n must be a positive integer", "params.n");
    if (!(n > 2.0 * gamma)) fail("params.n must exceed 2*gamma", "params.n");
    if (get_double("params.q_c") < 0) fail("params.q_c must be nonnegative", "params.q_c");
    if (!(get_double("params.h") > 0)) fail("params.h must be positive", "params.h");
    if (!(get_double("params.tol_resolvent") > 0))
        fail("params.tol_resolvent must be positive", "params.tol_resolvent");
    if (get_int("params.max_iter") < 1)
        fail("params.max_iter must be at least 1", "params.max_iter");

    if (!(get_double("run.t_end") > 0)) fail("run.t_end must be positive", "run.t_end");
    if (get_int("run.record_stride") < 1)
        fail("run.record_stride must be at least 1", "run.record_stride");
    if (get_int("run.snapshot_stride") < 0)
        fail("run.snapshot_stride must be nonnegative", "run.snapshot_stride");
    if (!(get_double("run.extinction_threshold") > 0))
        fail("run.extinction_threshold must be positive", "run.extinction_threshold");

    if (command_ == "ode") {
        if (!(get_double("ode.exponent") > 1)) fail("ode.exponent must exceed 1", "ode.exponent");
        const int sign = get_int("ode.q_sign");
        if (sign != 1 && sign != -1) fail("ode.q_sign must be +1 or -1", "ode.q_sign");
        if (get_double("ode.u0") < 0) fail("ode.u0 must be nonnegative", "ode.u0");
    }
    if (command_ == "flow-unrescaled" || command_ == "flow-rescaled" ||
        command_ == "resolvent") {
        const std::string& kind = get_string("init.kind");
        if (kind != "constant" && kind != "one_plus_cos" && kind != "random_smooth" &&
            kind != "file")
            fail("init.kind must be constant, one_plus_cos, random_smooth or file",
                 "init.kind");
        if (kind == "file" && get_string("init.path").empty())
            fail("init.kind = file requires init.path", "init.path");
    }
    if (command_ == "extension-check") {
        if (get_int("extension.levels") < 2)
            fail("extension.levels must be at least 2", "extension.levels");
        if (!(get_double("extension.beta") >= 1))
            fail("extension.beta must be >= 1", "extension.beta");
        if (!(get_double("extension.y_max") > 0))
            fail("extension.y_max must be positive", "extension.y_max");
        for (double g : get_double_list("extension.gammas"))
            if (!(g > 0.0 && g < 1.0)) fail("gamma must lie in (0,1)", "extension.gammas");
        const int nyq = pts / 2;
        for (int k : get_int_list("extension.modes"))
            if (k < 1 || k >= nyq)
                fail("extension.modes must lie in [1, points/2)", "extension.modes");
    }
    if (command_ == "diagnostics") {
        if (get_int("diagnostics.trials") < 1)
            fail("diagnostics.trials must be at least 1", "diagnostics.trials");
        const std::string& checks = get_string("diagnostics.checks");
        for (const auto& c : split_commas(checks))
            if (c != "all" && c != "t_contraction" && c != "stroock_varopoulos" &&
                c != "conformal" && c != "harnack_box")
                fail("unknown diagnostics check \"" + c + "\"", "diagnostics.checks");
        for (double g : get_double_list("diagnostics.sv_gammas"))
            if (!(g > 0.0 && g < 1.0)) fail("gamma must lie in (0,1)", "diagnostics.sv_gammas");
        for (double q : get_double_list("diagnostics.sv_q"))
            if (!(q > 1.0)) fail("sv_q entries must exceed 1", "diagnostics.sv_q");
    }
}

std::string RunConfig::echo() const {
    std::string out = "command = " + command_ + "\n";
    for (const auto& d : schema(command_)) {
        std::string shown;
        switch (d.type) {
            case KeyType::Double: shown = format_double(get_double(d.name)); break;
            case KeyType::Int: shown = std::to_string(get_int(d.name)); break;
            case KeyType::Bool: shown = get_bool(d.name) ? "true" : "false"; break;
            case KeyType::String: shown = get_string(d.name); break;
            case KeyType::DoubleList: {
                for (double v : get_double_list(d.name)) {
                    if (!shown.empty()) shown += ',';
                    shown += format_double(v);
                }
                break;
            }
            case KeyType::IntList: {
                for (int v : get_int_list(d.name)) {
                    if (!shown.empty()) shown += ',';
                    shown += std::to_string(v);
                }
                break;
            }
        }
        out += d.name + " = " + shown + "\n";
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        out.emplace_back(key, value);
    }
    return out;
}

} // namespace fyflow::cli
