#include "qnf/zpk_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qnf {

namespace {

using nlohmann::json;

json pair_of(const cplx& v, double scale) {
    return json::array({v.real() * scale, v.imag() * scale});
}

std::vector<cplx> pairs_from(const json& arr, double scale, const char* what) {
    if (!arr.is_array()) {
        std::ostringstream msg;
        msg << what << " must be an array of [re, im] pairs";
        throw input_error(msg.str());
    }
    std::vector<cplx> out;
    out.reserve(arr.size());
    for (const json& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            std::ostringstream msg;
            msg << what << " entries must be [re, im] number pairs";
            throw input_error(msg.str());
        }
        out.emplace_back(e[0].get<double>() * scale, e[1].get<double>() * scale);
    }
    return out;
}

double unit_scale(const json& j, bool to_internal) {
    if (!j.contains("unit") || !j["unit"].is_string())
        throw input_error("zpk JSON requires a \"unit\" string (\"rad_s\" or \"hz\")");
    const std::string unit = j["unit"].get<std::string>();
    if (unit == "rad_s") return 1.0;
    if (unit == "hz") return to_internal ? 2.0 * std::numbers::pi : 1.0 / (2.0 * std::numbers::pi);
    throw input_error("unsupported zpk unit \"" + unit + "\"; use \"rad_s\" or \"hz\"");
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw input_error("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

} // namespace

nlohmann::json zpk_to_json(const zpk& model, const std::string& unit) {
    double scale = 1.0;
    if (unit == "hz") scale = 1.0 / (2.0 * std::numbers::pi);
    else if (unit != "rad_s")
        throw input_error("unsupported zpk unit \"" + unit + "\"; use \"rad_s\" or \"hz\"");
    json j;
    j["unit"] = unit;
    j["zeros"] = json::array();
    j["poles"] = json::array();
    for (const cplx& z : model.zeros) j["zeros"].push_back(pair_of(z, scale));
    for (const cplx& p : model.poles) j["poles"].push_back(pair_of(p, scale));
    j["k"] = model.k;
    return j;
}

zpk zpk_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw input_error("zpk JSON must be an object");
    const double scale = unit_scale(j, /*to_internal=*/true);
    zpk model;
    model.zeros = j.contains("zeros") ? pairs_from(j["zeros"], scale, "zeros")
                                      : std::vector<cplx>{};
    model.poles = j.contains("poles") ? pairs_from(j["poles"], scale, "poles")
                                      : std::vector<cplx>{};
    if (j.contains("k")) {
        if (!j["k"].is_number()) throw input_error("k must be a number");
        model.k = j["k"].get<double>();
    }
    if (!(model.k > 0.0) || !std::isfinite(model.k))
        throw input_error("k must be a positive finite number");
    return model;
}

zpk load_zpk(const std::string& path) { return zpk_from_json(parse_file(path)); }

nlohmann::json config_to_json(const interferometer_config& config) {
    nlohmann::json j;
    j["L_s"] = config.L_s;
    j["L_f"] = config.L_f;
    j["T_IM"] = config.T_IM;
    j["T_CM"] = config.T_CM;
    j["T_EM"] = config.T_EM;
    j["lambda"] = config.lambda;
    j["Lambda_o"] = config.Lambda_o;
    j["Lambda_f"] = config.Lambda_f;
    j["Lambda_s"] = config.Lambda_s;
    return j;
}

interferometer_config config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw input_error("config JSON must be an object");
    interferometer_config c;
    const struct { const char* key; double* dst; } fields[] = {
        {"L_s", &c.L_s},         {"L_f", &c.L_f},
        {"T_IM", &c.T_IM},       {"T_CM", &c.T_CM},
        {"T_EM", &c.T_EM},       {"lambda", &c.lambda},
        {"Lambda_o", &c.Lambda_o}, {"Lambda_f", &c.Lambda_f},
        {"Lambda_s", &c.Lambda_s},
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& f : fields) {
            if (it.key() != f.key) continue;
            if (!it.value().is_number())
                throw input_error("config field " + it.key() + " must be a number");
            *f.dst = it.value().get<double>();
            known = true;
            break;
        }
        if (!known) throw input_error("unknown config field \"" + it.key() + "\"");
    }
    validate(c);
    return c;
}

interferometer_config load_config(const std::string& path) {
    return config_from_json(parse_file(path));
}

} // namespace qnf
