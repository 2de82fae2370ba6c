#pragma once

// Serialization boundary: flat JSON model records (gbar in dB only -- linear
// SNR never crosses this boundary) and CSV emission with shortest-round-trip
// float formatting so emitted files re-parse bit-exactly.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fadingmgf/errorrates.hpp"
#include "fadingmgf/expfit.hpp"
#include "fadingmgf/models.hpp"

namespace fadingmgf {

inline std::string fmt(double v)
{
    return detail::format_double(v);
}

inline double linear_to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

inline std::optional<Family> family_from_name(const std::string& name)
{
    for (Family f : {Family::eta_lambda_mu, Family::alpha_mu, Family::alpha_eta_mu,
                     Family::alpha_lambda_mu, Family::alpha_kappa_mu,
                     Family::alpha_lambda_eta_mu})
        if (name == family_name(f))
            return f;
    return std::nullopt;
}

inline std::optional<ModulationScheme> scheme_from_name(const std::string& name)
{
    for (ModulationScheme s : {ModulationScheme::mpsk, ModulationScheme::mdpsk,
                               ModulationScheme::mpam, ModulationScheme::mqam})
        if (name == scheme_name(s))
            return s;
    return std::nullopt;
}

inline nlohmann::json model_to_json(const FadingModel& m)
{
    nlohmann::json j;
    j["family"] = family_name(m.family);
    auto put = [&j](const char* key, double v) {
        if (!std::isnan(v))
            j[key] = v;
    };
    put("alpha", m.alpha);
    put("eta", m.eta);
    put("lambda", m.lambda);
    put("kappa", m.kappa);
    put("mu", m.mu);
    j["gbar_db"] = linear_to_db(m.gbar);
    return j;
}

inline FadingModel model_from_json(const nlohmann::json& j)
{
    if (!j.contains("family") || !j["family"].is_string())
        throw std::invalid_argument("model record: missing or non-string 'family'");
    auto fam = family_from_name(j["family"].get<std::string>());
    if (!fam)
        throw std::invalid_argument("model record: unknown family '" +
                                    j["family"].get<std::string>() + "'");
    FadingModel m;
    m.family = *fam;
    auto get = [&j](const char* key) {
        if (!j.contains(key))
            return std::numeric_limits<double>::quiet_NaN();
        if (!j[key].is_number())
            throw std::invalid_argument(std::string("model record: '") + key +
                                        "' must be a number");
        return j[key].get<double>();
    };
    m.alpha = get("alpha");
    m.eta = get("eta");
    m.lambda = get("lambda");
    m.kappa = get("kappa");
    m.mu = get("mu");
    double gbar_db = get("gbar_db");
    if (std::isnan(gbar_db))
        throw std::invalid_argument("model record: missing 'gbar_db'");
    m.gbar = db_to_linear(gbar_db);
    return m;
}

// Minimal CSV layer: numeric tables, comma separators, LF endings, '.'
// decimals (all cells are formatted by the caller; no quoting needed).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_to_string(const CsvTable& t)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << (i ? "," : "") << t.header[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
    return out.str();
}

inline CsvTable csv_from_string(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first) {
            t.header = split(line);
            first = false;
        } else {
            t.rows.push_back(split(line));
        }
    }
    return t;
}

inline CsvTable ser_curve_to_csv(const SerCurve& curve)
{
    CsvTable t;
    t.header = {"gbar_db", "ser", "strategy", "quad_error"};
    for (const auto& p : curve.points) {
        if (!p.error.empty())
            continue; // failed points live in the JSON form, not the table
        t.rows.push_back(
            {fmt(p.gbar_db), fmt(p.ser), strategy_name(curve.strategy), fmt(p.quad_error)});
    }
    return t;
}

inline nlohmann::json modulation_to_json(const ModulationSpec& spec)
{
    nlohmann::json j;
    j["scheme"] = scheme_name(spec.scheme);
    j["order"] = spec.M;
    j["Lambda"] = spec.Lambda;
    j["V"] = spec.V;
    j["phi"] = spec.phi;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : spec.terms)
        terms.push_back({{"prefactor", t.prefactor}, {"theta_limit", t.theta_limit}});
    j["terms"] = terms;
    if (spec.verification_pending)
        j["verification"] = "pending";
    return j;
}

inline nlohmann::json ser_curve_to_json(const SerCurve& curve)
{
    nlohmann::json j;
    j["schema"] = "fadingmgf/1";
    j["model"] = model_to_json(curve.model_template);
    j["modulation"] = modulation_to_json(curve.spec);
    j["strategy"] = strategy_name(curve.strategy);
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curve.points) {
        nlohmann::json pj;
        pj["gbar_db"] = p.gbar_db;
        if (p.error.empty()) {
            pj["ser"] = p.ser;
            pj["quad_error"] = p.quad_error;
        } else {
            pj["error"] = p.error;
        }
        pts.push_back(pj);
    }
    j["points"] = pts;
    return j;
}

} // namespace fadingmgf
