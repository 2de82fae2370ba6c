// fadingmgf CLI: PDF / MGF / SER evaluation and sweeps for the generalized
// fading models, plus fit management and the self-validation suite.
//
// Exit codes: 0 success, 1 validation-suite failure, 2 user/config error,
// 3 fit-quality failure.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fadingmgf/io.hpp"

namespace fm = fadingmgf;
using nlohmann::json;

namespace {

struct RunConfig {
    json model;           // flat key->value record (gbar_db in dB)
    std::string scheme = "mpsk";
    int order = 2;
    std::string strategy = "auto"; // cmd_mgf allows a comma list
    double sweep_start = -5.0, sweep_stop = 30.0, sweep_step = 5.0;
    std::string out;            // empty -> stdout
    std::string format = "csv"; // csv | json
    std::string fit_store;
    int jobs = 1;
    std::string preset;
    std::string perturb; // hidden: exponent mutations for the validate suite
    // grids
    int pdf_points = 200;
    double gamma_min = 0.0, gamma_max = 0.0; // 0 -> derived from gbar
    double s_min = 1e-2, s_max = 1e2;
    int s_points = 60;
    std::string abar_list; // cmd_fit
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep))
        parts.push_back(part);
    return parts;
}

double parse_num(const std::string& s, const std::string& what)
{
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("cannot parse number '" + s + "' for " + what);
    }
}

// --model family=...,alpha=...,mu=...,gbar-db=... merged over a config-file
// model record; special-case names expand to their generalized embeddings.
fm::FadingModel build_model(const json& config_model, const std::string& flag_spec)
{
    json rec = config_model.is_object() ? config_model : json::object();
    if (!flag_spec.empty()) {
        for (const auto& kv : split(flag_spec, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw UsageError("--model entries must be key=value (got '" + kv + "')");
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "gbar-db")
                key = "gbar_db";
            if (key == "family")
                rec[key] = val;
            else
                rec[key] = parse_num(val, "--model " + key);
        }
    }
    if (!rec.contains("family"))
        throw UsageError("no model family given (use --model family=... or --config)");
    std::string fam = rec["family"].get<std::string>();
    auto need = [&rec, &fam](const char* key) {
        if (!rec.contains(key))
            throw UsageError("model family '" + fam + "' requires field '" + key + "'");
        return rec[key].get<double>();
    };
    // special-case names resolve to their generalized-model embeddings
    if (fam == "rayleigh" || fam == "nakagami-m" || fam == "weibull" || fam == "hoyt" ||
        fam == "eta-mu" || fam == "kappa-mu" || fam == "lambda-mu" ||
        fam == "one-sided-gaussian") {
        double g = fm::db_to_linear(need("gbar_db"));
        if (fam == "rayleigh")
            return fm::rayleigh(g);
        if (fam == "nakagami-m")
            return fm::nakagami_m(need("m"), g);
        if (fam == "weibull")
            return fm::weibull(need("alpha"), g);
        if (fam == "hoyt")
            return fm::hoyt(need("q"), g);
        if (fam == "eta-mu")
            return fm::eta_mu(need("eta"), need("mu"), g);
        if (fam == "kappa-mu")
            return fm::kappa_mu(need("kappa"), need("mu"), g);
        if (fam == "lambda-mu")
            return fm::lambda_mu(need("lambda"), need("mu"), g);
        return fm::one_sided_gaussian(g);
    }
    fm::FadingModel m = fm::model_from_json(rec);
    auto problems = fm::validate(m);
    if (!problems.empty()) {
        std::string msg = "invalid model:";
        for (const auto& p : problems)
            msg += "\n  - " + p;
        throw UsageError(msg);
    }
    return m;
}

fm::MgfStrategy parse_strategy(const std::string& name)
{
    if (name == "auto")
        return fm::MgfStrategy::auto_select;
    if (name == "exact")
        return fm::MgfStrategy::exact_closed_form;
    if (name == "approx")
        return fm::MgfStrategy::approx_closed_form;
    if (name == "numeric")
        return fm::MgfStrategy::numeric_oracle;
    throw UsageError("unknown strategy '" + name + "' (auto|exact|approx|numeric)");
}

fm::ModulationSpec parse_modulation(const RunConfig& cfg)
{
    auto s = fm::scheme_from_name(cfg.scheme);
    if (!s)
        throw UsageError("unknown scheme '" + cfg.scheme + "' (mpsk|mdpsk|mpam|mqam)");
    try {
        return fm::modulation_spec(*s, cfg.order);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

fm::ExponentTweaks parse_perturb(const std::string& spec)
{
    fm::ExponentTweaks tw;
    if (spec.empty())
        return tw;
    for (const auto& kv : split(spec, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--perturb entries must be key=value");
        std::string key = kv.substr(0, eq);
        double val = parse_num(kv.substr(eq + 1), "--perturb " + key);
        if (key == "m")
            tw.m = val;
        else if (key == "nu")
            tw.nu = val;
        else if (key == "beta_scale")
            tw.beta_scale = val;
        else if (key == "d_scale")
            tw.d_scale = val;
        else if (key == "psi_scale")
            tw.psi_scale = val;
        else if (key == "cbar")
            tw.cbar = val;
        else if (key == "h_exp")
            tw.h_exp = val;
        else if (key == "kappa_exp")
            tw.kappa_exp = val;
        else
            throw UsageError("unknown --perturb field '" + key + "'");
    }
    return tw;
}

std::vector<double> sweep_grid(const RunConfig& cfg)
{
    if (!(cfg.sweep_step > 0.0))
        throw UsageError("sweep step must be > 0");
    if (!(cfg.sweep_stop >= cfg.sweep_start))
        throw UsageError("sweep stop must be >= start");
    std::vector<double> g;
    for (double v = cfg.sweep_start; v <= cfg.sweep_stop + 1e-9 * cfg.sweep_step;
         v += cfg.sweep_step)
        g.push_back(v);
    return g;
}

void emit(const RunConfig& cfg, const std::string& text)
{
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::trunc | std::ios::binary);
    if (!f)
        throw UsageError("cannot open output file '" + cfg.out + "'");
    f << text;
}

json table_to_json(const fm::CsvTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row;
        for (std::size_t i = 0; i < t.header.size() && i < r.size(); ++i) {
            char* end = nullptr;
            double v = std::strtod(r[i].c_str(), &end);
            if (end && *end == '\0' && end != r[i].c_str())
                row[t.header[i]] = v;
            else
                row[t.header[i]] = r[i];
        }
        rows.push_back(row);
    }
    return rows;
}

void emit_table(const RunConfig& cfg, const fm::CsvTable& t, json meta = json::object())
{
    if (cfg.format == "csv") {
        emit(cfg, fm::csv_to_string(t));
    } else if (cfg.format == "json") {
        json j = std::move(meta);
        j["schema"] = "fadingmgf/1";
        j["rows"] = table_to_json(t);
        emit(cfg, j.dump(2) + "\n");
    } else {
        throw UsageError("unknown format '" + cfg.format + "' (csv|json)");
    }
}

// ---- commands -------------------------------------------------------------

int cmd_pdf(const RunConfig& cfg)
{
    fm::FadingModel model = build_model(cfg.model, "");
    fm::ExponentTweaks tw = parse_perturb(cfg.perturb);
    fm::CompactParams p = fm::compact_params(model, tw);
    double lo = cfg.gamma_min > 0.0 ? cfg.gamma_min : 1e-3 * model.gbar;
    double hi = cfg.gamma_max > 0.0 ? cfg.gamma_max : 10.0 * model.gbar;
    if (!(lo < hi) || cfg.pdf_points < 2)
        throw UsageError("bad pdf grid");
    fm::CsvTable t;
    t.header = {"gamma", "pdf"};
    for (int i = 0; i < cfg.pdf_points; ++i) {
        double g =
            std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (cfg.pdf_points - 1.0));
        t.rows.push_back({fm::fmt(g), fm::fmt(fm::pdf(p, g))});
    }
    emit_table(cfg, t, json{{"command", "pdf"}, {"model", fm::model_to_json(model)}});
    return 0;
}

int cmd_mgf(const RunConfig& cfg)
{
    fm::FadingModel model = build_model(cfg.model, "");
    std::vector<std::string> strat_names = split(cfg.strategy, ',');
    std::vector<fm::MgfStrategy> strategies;
    bool has_numeric = false;
    for (const auto& n : strat_names) {
        fm::MgfStrategy s = parse_strategy(n);
        if (s != fm::MgfStrategy::auto_select && !fm::strategy_applicable(s, model.family))
            throw UsageError("strategy '" + n + "' not applicable to " +
                             fm::family_name(model.family) +
                             (s == fm::MgfStrategy::exact_closed_form
                                  ? " (no exact closed form for this family in scope)"
                                  : ""));
        strategies.push_back(s);
        if (s == fm::MgfStrategy::numeric_oracle)
            has_numeric = true;
    }
    if (strategies.empty())
        throw UsageError("no strategy given");
    if (cfg.s_points < 1 || !(cfg.s_min >= 0.0) || !(cfg.s_max > cfg.s_min))
        throw UsageError("bad s grid");

    fm::CsvTable t;
    t.header = {"s"};
    for (const auto& n : strat_names)
        t.header.push_back(n);
    if (has_numeric && strategies.size() > 1)
        t.header.push_back("rel_diff_vs_numeric");

    std::optional<fm::ExpSumFit> fit;
    bool needs_fit =
        model.family != fm::Family::eta_lambda_mu &&
        std::any_of(strategies.begin(), strategies.end(), [](fm::MgfStrategy s) {
            return s == fm::MgfStrategy::approx_closed_form ||
                   s == fm::MgfStrategy::auto_select;
        });
    if (needs_fit)
        fit = fm::get_or_fit(0.5 * model.alpha, cfg.fit_store);

    for (int i = 0; i < cfg.s_points; ++i) {
        double s = cfg.s_points == 1 ? cfg.s_min
                   : cfg.s_min == 0.0
                       ? cfg.s_max * i / (cfg.s_points - 1.0)
                       : std::exp(std::log(cfg.s_min) + (std::log(cfg.s_max) -
                                                         std::log(cfg.s_min)) *
                                                            i / (cfg.s_points - 1.0));
        std::vector<std::string> row{fm::fmt(s)};
        double numeric = 0.0, worst_other = 0.0;
        bool have_vals = false;
        std::vector<double> vals;
        for (fm::MgfStrategy st : strategies) {
            double v = fm::mgf(model, s, fit ? &*fit : nullptr, st);
            vals.push_back(v);
            row.push_back(fm::fmt(v));
            if (st == fm::MgfStrategy::numeric_oracle)
                numeric = v;
            have_vals = true;
        }
        if (has_numeric && strategies.size() > 1 && have_vals) {
            for (std::size_t k = 0; k < strategies.size(); ++k)
                if (strategies[k] != fm::MgfStrategy::numeric_oracle)
                    worst_other = std::max(worst_other,
                                           std::abs(vals[k] - numeric) /
                                               std::max(std::abs(numeric), 1e-300));
            row.push_back(fm::fmt(worst_other));
        }
        t.rows.push_back(std::move(row));
    }
    emit_table(cfg, t, json{{"command", "mgf"}, {"model", fm::model_to_json(model)}});
    return 0;
}

int cmd_fit(const RunConfig& cfg)
{
    if (cfg.abar_list.empty())
        throw UsageError("cmd fit requires --abar a1,a2,...");
    fm::CsvTable t;
    t.header = {"abar", "a1", "a2", "a3", "a4", "B1", "B2", "B3", "B4",
                "max_abs_err", "source"};
    for (const auto& tok : split(cfg.abar_list, ',')) {
        double abar = parse_num(tok, "--abar");
        long before = fm::fit_optimization_count().load();
        fm::ExpSumFit f = fm::get_or_fit(abar, cfg.fit_store);
        bool optimized = fm::fit_optimization_count().load() != before;
        std::vector<std::string> row{fm::fmt(f.abar)};
        for (int i = 0; i < 4; ++i)
            row.push_back(fm::fmt(f.a[i]));
        for (int i = 0; i < 4; ++i)
            row.push_back(fm::fmt(f.B[i]));
        row.push_back(fm::fmt(f.max_abs_err));
        row.push_back(optimized ? "fitted" : "cached");
        t.rows.push_back(std::move(row));
    }
    emit_table(cfg, t, json{{"command", "fit"}});
    return 0;
}

int cmd_ser(const RunConfig& cfg)
{
    fm::FadingModel model = build_model(cfg.model, "");
    fm::ModulationSpec spec = parse_modulation(cfg);
    fm::MgfStrategy strategy = parse_strategy(cfg.strategy);
    if (!fm::strategy_applicable(strategy, model.family))
        throw UsageError("strategy '" + cfg.strategy + "' not applicable to " +
                         fm::family_name(model.family));
    fm::AserResult r = fm::aser_detailed(model, spec, strategy);
    if (r.below_floor)
        std::cerr << "warning: SER below 1e-15; quadrature tolerance dominates\n";
    fm::CsvTable t;
    t.header = {"gbar_db", "ser", "strategy", "quad_error"};
    t.rows.push_back({fm::fmt(fm::linear_to_db(model.gbar)), fm::fmt(r.value),
                      cfg.strategy, fm::fmt(r.quad_error)});
    emit_table(cfg, t,
               json{{"command", "ser"},
                    {"model", fm::model_to_json(model)},
                    {"modulation", fm::modulation_to_json(spec)}});
    return 0;
}

struct PresetCurve {
    std::string label;
    fm::FadingModel model; // gbar overridden per sweep point
};

// Figure presets pin the per-curve parameters the captions leave unstated;
// the pinned values are printed in the output so regeneration is explicit.
std::vector<PresetCurve> preset_curves(const std::string& preset)
{
    std::vector<PresetCurve> out;
    auto label = [](const std::string& s) { return s; };
    if (preset == "fig1") {
        // alpha-kappa-mu, alpha = 2 per caption; kappa/mu grids pinned here
        for (double mu : {0.5, 1.0, 2.5})
            for (double kappa : {0.0, 1.0, 3.0})
                out.push_back({label("alpha=2 kappa=" + fm::fmt(kappa) +
                                     " mu=" + fm::fmt(mu)),
                               fm::FadingModel::alpha_kappa_mu(2.0, kappa, mu, 1.0)});
    } else if (preset == "fig2") {
        // alpha-lambda-eta-mu, alpha = 2, lambda = 0 per caption
        for (double mu : {0.5, 1.0, 2.5})
            for (double eta : {0.5, 2.0})
                out.push_back({label("alpha=2 lambda=0 eta=" + fm::fmt(eta) +
                                     " mu=" + fm::fmt(mu)),
                               fm::FadingModel::alpha_lambda_eta_mu(2.0, 0.0, eta, mu, 1.0)});
    } else if (preset == "fig3") {
        // eta-lambda-mu (exact closed forms)
        for (double mu : {0.5, 1.5})
            for (double lambda : {0.0, 0.5})
                for (double eta : {0.5, 2.0})
                    out.push_back({label("eta=" + fm::fmt(eta) + " lambda=" +
                                         fm::fmt(lambda) + " mu=" + fm::fmt(mu)),
                                   fm::FadingModel::eta_lambda_mu(eta, lambda, mu, 1.0)});
    } else if (preset == "fig4") {
        // alpha-mu; alpha pinned to gate-passing fits
        for (double mu : {0.5, 1.0, 2.5})
            for (double alpha : {2.0, 3.0})
                out.push_back({label("alpha=" + fm::fmt(alpha) + " mu=" + fm::fmt(mu)),
                               fm::FadingModel::alpha_mu(alpha, mu, 1.0)});
    } else {
        throw UsageError("unknown preset '" + preset + "' (fig1|fig2|fig3|fig4)");
    }
    return out;
}

// Sweep points are independent; run them on up to cfg.jobs threads with the
// output assembled by index so the emitted file is deterministic.
fm::SerCurve run_sweep(const fm::FadingModel& tmpl, const std::vector<double>& grid,
                       const fm::ModulationSpec& spec, fm::MgfStrategy strategy, int jobs)
{
    fm::SerCurve curve;
    curve.model_template = tmpl;
    curve.spec = spec;
    curve.strategy = strategy;
    curve.points.resize(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= grid.size())
                return;
            auto& pt = curve.points[i];
            pt.gbar_db = grid[i];
            fm::FadingModel m = tmpl;
            m.gbar = fm::db_to_linear(grid[i]);
            try {
                fm::AserResult r = fm::aser_detailed(m, spec, strategy);
                pt.ser = r.value;
                pt.quad_error = r.quad_error;
            } catch (const std::exception& e) {
                pt.error = e.what();
            }
        }
    };
    int n = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return curve;
}

int cmd_sweep(const RunConfig& cfg)
{
    fm::ModulationSpec spec = parse_modulation(cfg);
    fm::MgfStrategy strategy = parse_strategy(cfg.strategy);
    std::vector<double> grid = sweep_grid(cfg);

    std::vector<PresetCurve> curves;
    if (!cfg.preset.empty())
        curves = preset_curves(cfg.preset);
    else
        curves.push_back({"", build_model(cfg.model, "")});

    // warm the fit cache up front so worker threads only read
    for (const auto& c : curves)
        if (c.model.family != fm::Family::eta_lambda_mu &&
            (strategy == fm::MgfStrategy::approx_closed_form ||
             strategy == fm::MgfStrategy::auto_select))
            fm::get_or_fit(0.5 * c.model.alpha, cfg.fit_store);

    std::vector<fm::SerCurve> results;
    for (const auto& c : curves)
        results.push_back(run_sweep(c.model, grid, spec, strategy, cfg.jobs));

    if (cfg.format == "csv") {
        std::ostringstream out;
        for (std::size_t i = 0; i < curves.size(); ++i) {
            if (!curves[i].label.empty())
                out << "# curve: " << curves[i].label << "\n";
            out << fm::csv_to_string(fm::ser_curve_to_csv(results[i]));
            for (const auto& p : results[i].points)
                if (!p.error.empty())
                    out << "# error at gbar_db=" << fm::fmt(p.gbar_db) << ": " << p.error
                        << "\n";
        }
        emit(cfg, out.str());
    } else if (cfg.format == "json") {
        json j;
        j["schema"] = "fadingmgf/1";
        j["command"] = "sweep";
        if (!cfg.preset.empty())
            j["preset"] = cfg.preset;
        json arr = json::array();
        for (std::size_t i = 0; i < curves.size(); ++i) {
            json cj = fm::ser_curve_to_json(results[i]);
            if (!curves[i].label.empty())
                cj["label"] = curves[i].label;
            arr.push_back(cj);
        }
        j["curves"] = arr;
        emit(cfg, j.dump(2) + "\n");
    } else {
        throw UsageError("unknown format '" + cfg.format + "' (csv|json)");
    }
    return 0;
}

// ---- validate -------------------------------------------------------------

struct Check {
    std::string name;
    double tolerance;
    double observed = 0.0;
    bool pass = false;
    std::string detail;
};

// The fixed validation model set: every family, including non-degenerate
// members so each compact-form exponent is load-bearing.
std::vector<fm::FadingModel> validation_models()
{
    return {
        fm::FadingModel::eta_lambda_mu(0.5, 0.3, 1.5, 2.0),
        fm::FadingModel::eta_lambda_mu(4.0, 0.7, 0.8, 1.0),
        fm::FadingModel::eta_lambda_mu(1.0, 0.0, 1.0, 1.0), // degenerate row
        fm::FadingModel::alpha_mu(2.0, 1.0, 1.0),
        fm::FadingModel::alpha_mu(3.5, 2.2, 5.0),
        fm::FadingModel::alpha_eta_mu(2.6, 0.4, 1.3, 1.0),
        fm::FadingModel::alpha_eta_mu(2.0, 2.5, 0.7, 3.0),
        fm::FadingModel::alpha_lambda_mu(3.0, 0.45, 1.8, 1.0),
        fm::FadingModel::alpha_lambda_mu(2.0, 0.8, 0.6, 2.0),
        fm::FadingModel::alpha_kappa_mu(2.4, 1.5, 1.2, 1.0),
        fm::FadingModel::alpha_kappa_mu(2.0, 4.0, 0.9, 2.0),
        fm::FadingModel::alpha_lambda_eta_mu(2.8, 0.35, 0.6, 1.4, 1.0),
        fm::FadingModel::alpha_lambda_eta_mu(2.0, 0.6, 3.0, 1.0, 1.5),
    };
}

int cmd_validate(const RunConfig& cfg)
{
    fm::ExponentTweaks tw = parse_perturb(cfg.perturb);
    std::vector<Check> checks;

    // A check that throws (quadrature blow-up, domain error) is a failed
    // check, not a tool crash: the suite still reports and exits 1.
    auto run = [&checks](Check c, auto&& body) {
        try {
            body(c);
            c.pass = c.observed <= c.tolerance;
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("exception: ") + e.what();
        }
        checks.push_back(std::move(c));
    };

    run(Check{"pdf-normalization", 1e-6}, [&tw](Check& c) {
        for (const auto& model : validation_models()) {
            fm::CompactParams p = fm::compact_params(model, tw);
            auto q0 = fm::integrate_semi_infinite([&p](double g) { return fm::pdf(p, g); });
            c.observed = std::max(c.observed, std::abs(q0.value - 1.0));
        }
    });

    run(Check{"pdf-mean", 1e-4}, [&tw](Check& c) {
        for (const auto& model : validation_models()) {
            fm::CompactParams p = fm::compact_params(model, tw);
            auto q1 =
                fm::integrate_semi_infinite([&p](double g) { return g * fm::pdf(p, g); });
            c.observed =
                std::max(c.observed, std::abs(q1.value - model.gbar) / model.gbar);
        }
    });

    run(Check{"eq7-eq8-equivalence", 1e-10}, [](Check& c) {
        for (const auto& model : validation_models()) {
            if (model.family != fm::Family::eta_lambda_mu)
                continue;
            for (double s : {0.0, 0.1, 1.0, 10.0, 100.0}) {
                double r8 = fm::mgf_eta_lambda_mu_rational(model, s);
                double r7 = fm::mgf_eta_lambda_mu_hyp(model, s);
                c.observed = std::max(c.observed, std::abs(r7 - r8) / r8);
            }
        }
    });

    run(Check{"exact-vs-oracle", 1e-8}, [](Check& c) {
        for (const auto& model : validation_models()) {
            if (model.family != fm::Family::eta_lambda_mu)
                continue;
            for (double s : {0.1, 1.0, 10.0}) {
                double r8 = fm::mgf_eta_lambda_mu_rational(model, s);
                double rn = fm::mgf_numeric(model, s);
                c.observed = std::max(c.observed, std::abs(r8 - rn) / rn);
            }
        }
    });

    run(Check{"special-case-reductions", 1e-9}, [](Check& c) {
        // Rayleigh density and MGF; Nakagami MGF; eta-lambda-mu Rayleigh route
        for (double g : {0.5, 1.0, 2.0}) {
            double v = fm::pdf(fm::rayleigh(1.0), g);
            c.observed = std::max(c.observed, std::abs(v - std::exp(-g)));
        }
        for (double s : {0.5, 3.0}) {
            double naka = fm::mgf_numeric(fm::nakagami_m(2.5, 1.0), s);
            double ref = std::exp(2.5 * std::log(2.5 / (2.5 + s)));
            c.observed = std::max(c.observed, std::abs(naka - ref) / ref);
            double elm =
                fm::mgf_eta_lambda_mu_rational(fm::FadingModel::eta_lambda_mu(1.0, 0.0, 0.5, 1.0), s);
            double ray = 1.0 / (1.0 + s);
            c.observed = std::max(c.observed, std::abs(elm - ray) / ray);
        }
    });

    run(Check{"rayleigh-bpsk", 1e-6}, [](Check& c) {
        auto bpsk = fm::modulation_spec(fm::ModulationScheme::mpsk, 2);
        for (double g : {1.0, 10.0}) {
            double ref = fm::rayleigh_bpsk_reference(g);
            double v = fm::aser(fm::rayleigh(g), bpsk, fm::MgfStrategy::numeric_oracle);
            c.observed = std::max(c.observed, std::abs(v - ref) / ref);
        }
    });

    // M-DPSK shipped as printed: report both readings, no pass judgement
    run(Check{"mdpsk-binary-discrepancy", 1.0}, // informational: ASER is in (0,1)
        [](Check& c) {
            auto d2 = fm::modulation_spec(fm::ModulationScheme::mdpsk, 2);
            double as_printed =
                fm::aser(fm::rayleigh(1.0), d2, fm::MgfStrategy::numeric_oracle);
            double classical = 0.5 * fm::mgf_numeric(fm::rayleigh(1.0), 1.0);
            c.observed = as_printed;
            c.detail = "as-printed " + fm::fmt(as_printed) +
                       " vs classical binary-DPSK " + fm::fmt(classical) +
                       " (verification pending; informational)";
        });

    bool all = true;
    for (const auto& c : checks)
        all = all && c.pass;

    json report;
    report["schema"] = "fadingmgf/1";
    report["command"] = "validate";
    report["pass"] = all;
    if (!cfg.perturb.empty())
        report["perturb"] = cfg.perturb;
    json arr = json::array();
    for (const auto& c : checks) {
        json cj{{"name", c.name},
                {"pass", c.pass},
                {"tolerance", c.tolerance},
                {"observed", c.observed}};
        if (!c.detail.empty())
            cj["detail"] = c.detail;
        arr.push_back(cj);
    }
    report["checks"] = arr;
    emit(cfg, report.dump(2) + "\n");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"MGF-based analysis of generalized fading channels"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, model_spec;
    // flag presence decides whether a value overrides the config file
    std::map<std::string, CLI::Option*> opts;

    auto add_common = [&](CLI::App* sub) {
        opts["config:" + sub->get_name()] =
            sub->add_option("--config", config_path, "JSON config file");
        opts["model:" + sub->get_name()] =
            sub->add_option("--model", model_spec, "family=...,key=value,... model record");
        opts["strategy:" + sub->get_name()] =
            sub->add_option("--strategy", cfg.strategy, "auto|exact|approx|numeric");
        opts["out:" + sub->get_name()] = sub->add_option("--out", cfg.out, "output file");
        opts["format:" + sub->get_name()] =
            sub->add_option("--format", cfg.format, "csv|json");
        opts["fit-store:" + sub->get_name()] =
            sub->add_option("--fit-store", cfg.fit_store, "persistent fit cache file");
        opts["jobs:" + sub->get_name()] = sub->add_option("--jobs", cfg.jobs, "worker threads");
        auto* p = sub->add_option("--perturb", cfg.perturb,
                                  "exponent mutations key=delta,... (test fixture)");
        p->group(""); // hidden
    };

    CLI::App* pdf = app.add_subcommand("pdf", "evaluate the SNR density on a grid");
    add_common(pdf);
    pdf->add_option("--points", cfg.pdf_points, "grid points");
    pdf->add_option("--gamma-min", cfg.gamma_min, "grid start (default 1e-3*gbar)");
    pdf->add_option("--gamma-max", cfg.gamma_max, "grid stop (default 10*gbar)");

    CLI::App* mgf = app.add_subcommand("mgf", "evaluate the MGF on an s grid");
    add_common(mgf);
    mgf->add_option("--s-min", cfg.s_min, "s grid start");
    mgf->add_option("--s-max", cfg.s_max, "s grid stop");
    mgf->add_option("--s-points", cfg.s_points, "s grid points");

    CLI::App* fit = app.add_subcommand("fit", "compute/report exponential-sum fits");
    add_common(fit);
    fit->add_option("--abar", cfg.abar_list, "comma list of abar values");

    CLI::App* ser = app.add_subcommand("ser", "average symbol error rate at one gbar");
    add_common(ser);
    ser->add_option("--scheme", cfg.scheme, "mpsk|mdpsk|mpam|mqam");
    ser->add_option("--order", cfg.order, "modulation order M");

    CLI::App* sweep = app.add_subcommand("sweep", "SER curve over a gbar_db grid");
    add_common(sweep);
    sweep->add_option("--scheme", cfg.scheme, "mpsk|mdpsk|mpam|mqam");
    sweep->add_option("--order", cfg.order, "modulation order M");
    std::string sweep_spec;
    auto* sweep_opt = sweep->add_option("--sweep", sweep_spec, "start:stop:step in dB");
    sweep->add_option("--preset", cfg.preset, "fig1|fig2|fig3|fig4 figure recipes");

    CLI::App* validate = app.add_subcommand("validate", "run the self-check suite");
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // user/config error
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();

        // config file first, then flags override
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw UsageError("cannot open config file '" + config_path + "'");
            json conf;
            try {
                in >> conf;
            } catch (const json::exception& e) {
                throw UsageError(std::string("config parse error: ") + e.what());
            }
            auto flag_given = [&](const std::string& key) {
                auto it = opts.find(key + ":" + name);
                return it != opts.end() && it->second->count() > 0;
            };
            if (conf.contains("model"))
                cfg.model = conf["model"];
            auto take = [&](const char* key, auto& target) {
                if (conf.contains(key) && !flag_given(key))
                    target = conf[key].get<std::decay_t<decltype(target)>>();
            };
            take("strategy", cfg.strategy);
            take("out", cfg.out);
            take("format", cfg.format);
            take("fit_store", cfg.fit_store);
            take("jobs", cfg.jobs);
            take("scheme", cfg.scheme);
            take("order", cfg.order);
            take("preset", cfg.preset);
            take("abar", cfg.abar_list);
            if (conf.contains("sweep")) {
                const auto& sj = conf["sweep"];
                if (sj.contains("start"))
                    cfg.sweep_start = sj["start"].get<double>();
                if (sj.contains("stop"))
                    cfg.sweep_stop = sj["stop"].get<double>();
                if (sj.contains("step"))
                    cfg.sweep_step = sj["step"].get<double>();
            }
        }
        if (!model_spec.empty()) {
            // merge flag model over config model inside build_model
        }
        if (sweep_opt->count() > 0) {
            auto parts = split(sweep_spec, ':');
            if (parts.size() != 3)
                throw UsageError("--sweep must be start:stop:step");
            cfg.sweep_start = parse_num(parts[0], "--sweep start");
            cfg.sweep_stop = parse_num(parts[1], "--sweep stop");
            cfg.sweep_step = parse_num(parts[2], "--sweep step");
        }
        if (!model_spec.empty()) {
            // normalize into cfg.model via build_model at command time
        }
        // stash the flag spec so commands can merge it
        if (!model_spec.empty()) {
            json merged = cfg.model.is_object() ? cfg.model : json::object();
            fm::FadingModel probe = build_model(merged, model_spec); // validates
            cfg.model = fm::model_to_json(probe);
        }

        if (name == "pdf")
            return cmd_pdf(cfg);
        if (name == "mgf")
            return cmd_mgf(cfg);
        if (name == "fit")
            return cmd_fit(cfg);
        if (name == "ser")
            return cmd_ser(cfg);
        if (name == "sweep")
            return cmd_sweep(cfg);
        if (name == "validate")
            return cmd_validate(cfg);
        throw UsageError("unknown command");
    } catch (const fm::FitQualityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
