#include "vsr/config.hpp"
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vsr {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': not a number: " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    int i = int(d);
    if (double(i) != d)
        throw std::invalid_argument("config key '" + key + "': not an integer: " + v);
    return i;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::invalid_argument("config key '" + key + "': not a boolean: " + v);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
}

ForceKind to_kind(const std::string& key, const std::string& v) {
    if (v == "zero") return ForceKind::zero;
    if (v == "linear_spring") return ForceKind::linear_spring;
    if (v == "time_ramp") return ForceKind::time_ramp;
    if (v == "user_table") return ForceKind::user_table;
    throw std::invalid_argument("config key '" + key + "': unknown force kind: " + v);
}

} // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config: " + path);
    RunConfig cfg;
    ModelParams& p = cfg.params;
    std::string wext_table, oext_table;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "N") p.N = to_int(key, val);
        else if (key == "M_s") p.M_s = to_int(key, val);
        else if (key == "k") p.prox.k = to_double(key, val);
        else if (key == "lambda") p.prox.lambda = to_double(key, val);
        else if (key == "alpha") p.prox.alpha = to_double(key, val);
        else if (key == "dt") p.dt = to_double(key, val);
        else if (key == "t_end") p.t_end = to_double(key, val);
        else if (key == "integrator") {
            if (val == "semi_implicit") p.integrator = Integrator::semi_implicit;
            else if (val == "rk2_imex") p.integrator = Integrator::rk2_imex;
            else throw std::invalid_argument("config key 'integrator': unknown: " + val);
        } else if (key == "leray") {
            if (val == "plain") p.leray = LerayMode::plain;
            else if (val == "projected") p.leray = LerayMode::projected;
            else throw std::invalid_argument("config key 'leray': unknown: " + val);
        } else if (key == "dealias") p.dealias = to_bool(key, val);
        else if (key == "sample_every") p.sample_every = to_int(key, val);
        else if (key == "reject_on_budget") p.reject_on_budget = to_bool(key, val);
        else if (key == "snapshot_every") cfg.snapshot_every = to_int(key, val);
        else if (key == "wext.kind") p.wext.kind = to_kind(key, val);
        else if (key == "wext.gain") p.wext.gain = to_double(key, val);
        else if (key == "wext.t_ramp") p.wext.t_ramp = to_double(key, val);
        else if (key == "wext.table") wext_table = val;
        else if (key == "oext.kind") p.oext.kind = to_kind(key, val);
        else if (key == "oext.gain") p.oext.gain = to_double(key, val);
        else if (key == "oext.t_ramp") p.oext.t_ramp = to_double(key, val);
        else if (key == "oext.table") oext_table = val;
        else if (key == "w0.modes") {
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                auto colon = item.find(':');
                if (colon == std::string::npos)
                    throw std::invalid_argument(
                        "config key 'w0.modes': expected index:value, got " + item);
                p.w0_modes.emplace_back(to_int(key, trim(item.substr(0, colon))),
                                        to_double(key, trim(item.substr(colon + 1))));
            }
        } else if (key == "experiment") cfg.experiment = val;
        else if (key == "contdep.eps") cfg.contdep_eps = to_double(key, val);
        else if (key == "contdep.mode") cfg.contdep_mode = to_int(key, val);
        else if (key == "sweep.axis") cfg.sweep_axis = val;
        else if (key == "sweep.values") cfg.sweep_values = to_list(key, val);
        else if (key == "reaction.scale") cfg.reaction_scale = to_double(key, val);
        else if (key == "reaction.lambdas") cfg.reaction_lambdas = to_list(key, val);
        else if (key == "reaction.sigma_file") cfg.reaction_sigma_file = val;
        else
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown config key '" + key + "'");
    }
    if (!wext_table.empty()) p.wext.table = ExternalForce::load_table_csv(wext_table);
    if (!oext_table.empty()) p.oext.table = ExternalForce::load_table_csv(oext_table);
    p.validate();
    return cfg;
}

std::map<std::string, std::string> RunConfig::resolved() const {
    auto num = [](double v) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v;
        return ss.str();
    };
    std::map<std::string, std::string> m;
    const ModelParams& p = params;
    m["N"] = std::to_string(p.N);
    m["M_s"] = std::to_string(p.M_s);
    m["k"] = num(p.prox.k);
    m["lambda"] = num(p.prox.lambda);
    m["alpha"] = num(p.prox.alpha);
    m["dt"] = num(p.dt);
    m["t_end"] = num(p.t_end);
    m["integrator"] =
        p.integrator == Integrator::semi_implicit ? "semi_implicit" : "rk2_imex";
    m["leray"] = p.leray == LerayMode::plain ? "plain" : "projected";
    m["dealias"] = p.dealias ? "true" : "false";
    m["sample_every"] = std::to_string(p.sample_every);
    m["snapshot_every"] = std::to_string(snapshot_every);
    auto kind = [](ForceKind k) {
        switch (k) {
        case ForceKind::zero: return "zero";
        case ForceKind::linear_spring: return "linear_spring";
        case ForceKind::time_ramp: return "time_ramp";
        case ForceKind::user_table: return "user_table";
        }
        return "zero";
    };
    m["wext.kind"] = kind(p.wext.kind);
    m["wext.gain"] = num(p.wext.gain);
    m["oext.kind"] = kind(p.oext.kind);
    m["oext.gain"] = num(p.oext.gain);
    {
        std::ostringstream ss;
        for (std::size_t i = 0; i < p.w0_modes.size(); ++i) {
            if (i) ss << ",";
            ss << p.w0_modes[i].first << ":" << num(p.w0_modes[i].second);
        }
        m["w0.modes"] = ss.str();
    }
    if (!experiment.empty()) m["experiment"] = experiment;
    return m;
}

} // namespace vsr
