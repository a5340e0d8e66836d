#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "celab/lab.hpp"

namespace celab {

using njson = nlohmann::ordered_json;

namespace {

njson point_json(const SpherePoint& p) {
    if (p.is_inf()) return njson("inf");
    return njson::array({p.value().real(), p.value().imag()});
}

njson finite_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

njson series_json(const std::vector<double>& v) {
    njson a = njson::array();
    for (double x : v) a.push_back(finite_or_null(x));
    return a;
}

njson coeffs_json(const Polynomial& p) {
    njson a = njson::array();
    for (const Complex& c : p.coeffs()) a.push_back(njson::array({c.real(), c.imag()}));
    return a;
}

njson config_echo(const RunConfig& cfg) {
    njson m;
    m["name"] = cfg.map.name.empty() ? njson(nullptr) : njson(cfg.map.name);
    m["param"] = cfg.map.param
                     ? njson::array({cfg.map.param->real(), cfg.map.param->imag()})
                     : njson(nullptr);
    m["numerator"] = coeffs_json(cfg.map.numerator);
    m["denominator"] = coeffs_json(cfg.map.denominator);
    njson ovs = njson::array();
    for (const auto& ov : cfg.map.julia_overrides) {
        njson o;
        o["point"] = point_json(ov.point);
        o["in_julia"] = ov.in_julia;
        ovs.push_back(o);
    }
    m["julia_overrides"] = ovs;

    njson c;
    c["map"] = m;
    c["horizons"] = {{"forward", cfg.forward_N},
                     {"backward", cfg.backward_n},
                     {"cover", cfg.cover_depth}};
    c["scale"] = {{"R", cfg.scale_R}, {"R_prime", cfg.scale_R_prime}};
    c["tce"] = {{"r", cfg.tce_r},
                {"M", cfg.tce_M},
                {"P", cfg.tce_P},
                {"z", cfg.tce_z ? point_json(*cfg.tce_z) : njson(nullptr)}};
    c["expshrink"] = {{"r", cfg.expshrink_r}, {"anchor", cfg.expshrink_anchor}};
    c["samples"] = {{"base", cfg.base_samples},
                    {"branch", cfg.branch_samples},
                    {"circle", cfg.circle_samples},
                    {"julia", cfg.julia_samples}};
    c["julia_horizon"] = cfg.julia_horizon;
    c["sr"] = {{"C", cfg.sr_C ? njson(*cfg.sr_C) : njson(nullptr)}};
    c["seed"] = cfg.seed;
    c["branch_cap"] = cfg.branch_cap;
    return c;
}

njson opt_num(const std::optional<double>& v) { return v ? njson(*v) : njson(nullptr); }

} // namespace

std::string report_to_json_string(const EquivalenceReport& rep, const RunConfig& cfg) {
    njson j;
    j["schema_version"] = 1;
    j["tool"] = {{"name", "celab"}, {"version", "0.1.0"}};
    j["config"] = config_echo(cfg);

    njson map;
    map["degree"] = rep.degree;
    njson crits = njson::array();
    for (const auto& e : rep.crit.entries) {
        njson c;
        c["point"] = point_json(e.point);
        c["mu"] = e.mu;
        c["in_julia"] = e.in_julia;
        c["warning"] = e.warning;
        crits.push_back(c);
    }
    map["critical_points"] = crits;
    map["mu_max"] = rep.crit.crit_prime_empty() ? njson(nullptr) : njson(rep.crit.mu_max());
    map["crit_prime_empty"] = rep.crit.crit_prime_empty();
    j["map"] = map;

    njson verdicts;
    verdicts["vacuous"] = rep.vacuous;
    verdicts["note"] = rep.verdict_note;
    verdicts["ce_observed"] =
        rep.ce ? njson(rep.ce->observed) : njson(nullptr);
    verdicts["ce2_observed"] = rep.ce2 ? njson(rep.ce2->observed) : njson(nullptr);
    verdicts["expshrink_observed"] =
        rep.expshrink ? njson(rep.expshrink->observed) : njson(nullptr);
    verdicts["sr_observed"] =
        rep.sr ? njson(rep.sr->alpha <= 1e-12) : njson(nullptr);
    j["verdicts"] = verdicts;

    njson est;
    if (rep.ce) {
        njson e;
        e["lambda1"] = finite_or_null(rep.ce->lambda1);
        e["C1"] = finite_or_null(rep.ce->C1);
        e["observed"] = rep.ce->observed;
        e["critical_hit"] =
            rep.ce->critical_hit ? njson(*rep.ce->critical_hit) : njson(nullptr);
        e["per_n_exponents"] = series_json(rep.ce->per_n_exponents);
        njson by = njson::array();
        for (const auto& [c, ce] : rep.ce_by_crit) {
            njson b;
            b["point"] = point_json(c);
            b["lambda1"] = finite_or_null(ce.lambda1);
            b["C1"] = finite_or_null(ce.C1);
            b["observed"] = ce.observed;
            by.push_back(b);
        }
        e["by_critical_point"] = by;
        est["ce"] = e;
    } else {
        est["ce"] = nullptr;
    }
    if (rep.ce2) {
        njson e;
        e["lambda2"] = finite_or_null(rep.ce2->lambda2);
        e["C2"] = finite_or_null(rep.ce2->C2);
        e["observed"] = rep.ce2->observed;
        e["per_n_min"] = series_json(rep.ce2->per_n_min);
        e["per_n_min_log"] = series_json(rep.ce2->per_n_min_log);
        njson by = njson::array();
        for (const auto& [c, ce2] : rep.ce2_by_crit) {
            njson b;
            b["point"] = point_json(c);
            b["lambda2"] = finite_or_null(ce2.lambda2);
            b["C2"] = finite_or_null(ce2.C2);
            b["observed"] = ce2.observed;
            by.push_back(b);
        }
        e["by_critical_point"] = by;
        est["ce2"] = e;
    } else {
        est["ce2"] = nullptr;
    }
    if (rep.sr) {
        njson e;
        e["alpha"] = rep.sr->alpha;
        e["C"] = rep.sr->C;
        e["witness_n"] = rep.sr->witness_n;
        e["min_distance"] =
            *std::min_element(rep.sr->distance_series.begin(), rep.sr->distance_series.end());
        e["distance_series"] = series_json(rep.sr->distance_series);
        njson by = njson::array();
        for (const auto& [c, d] : rep.sr_by_crit) {
            njson b;
            b["point"] = point_json(c);
            b["min_distance"] = *std::min_element(d.values.begin(), d.values.end());
            by.push_back(b);
        }
        e["by_critical_point"] = by;
        est["sr"] = e;
    } else {
        est["sr"] = nullptr;
    }
    if (rep.expshrink) {
        njson e;
        e["lambda_exp"] = finite_or_null(rep.expshrink->lambda_exp);
        e["r_exp"] = rep.expshrink->r_exp;
        e["observed"] = rep.expshrink->observed;
        e["unreliable"] = rep.expshrink->unreliable;
        e["attempted"] = rep.expshrink->attempted;
        e["failed"] = rep.expshrink->failed;
        e["skipped_branches"] = rep.expshrink->skipped_branches;
        e["per_n_max_diam"] = series_json(rep.expshrink->per_n_max_diam);
        est["expshrink"] = e;
    } else {
        est["expshrink"] = nullptr;
    }
    if (rep.first_return) {
        njson e;
        e["R"] = cfg.scale_R;
        e["K"] = rep.first_return->K ? njson(*rep.first_return->K) : njson(nullptr);
        njson entries = njson::array();
        for (const auto& fe : rep.first_return->entries) {
            njson b;
            b["c"] = point_json(fe.c);
            b["m"] = fe.m ? njson(*fe.m) : njson(nullptr);
            b["K_c"] = fe.K_c ? njson(*fe.K_c) : njson(nullptr);
            entries.push_back(b);
        }
        e["entries"] = entries;
        est["first_return"] = e;
    } else {
        est["first_return"] = nullptr;
    }
    if (rep.tce) {
        njson e;
        e["pass"] = rep.tce->pass;
        e["z"] = point_json(rep.tce->z);
        e["r"] = rep.tce->params.r;
        e["M"] = rep.tce->params.M;
        e["P"] = rep.tce->params.P;
        e["horizon"] = rep.tce->horizon;
        e["chosen_nj"] = rep.tce->chosen_nj;
        e["per_j_counts"] = rep.tce->per_j_counts;
        e["all_counts"] = rep.tce->all_counts;
        e["skipped"] = rep.tce->skipped;
        est["tce"] = e;
    } else {
        est["tce"] = nullptr;
    }
    j["estimates"] = est;

    if (rep.orbit) {
        njson o;
        o["z0"] = point_json(*rep.orbit_z0);
        njson pts = njson::array();
        for (const auto& p : rep.orbit->points) pts.push_back(point_json(p));
        o["points"] = pts;
        o["log_deriv_prefix"] = series_json(rep.orbit->log_deriv_prefix);
        o["critical_hit"] =
            rep.orbit->critical_hit ? njson(*rep.orbit->critical_hit) : njson(nullptr);
        j["orbit"] = o;
    } else {
        j["orbit"] = nullptr;
    }

    if (rep.consistency) {
        njson c;
        c["normalization"] = "log lambda1 | mu_max * log lambda2 | log lambda_exp";
        c["exponents"] = {{"ce", opt_num(rep.consistency->e_ce)},
                          {"ce2", opt_num(rep.consistency->e_ce2)},
                          {"expshrink", opt_num(rep.consistency->e_expshrink)}};
        c["gaps"] = {{"ce_ce2", opt_num(rep.consistency->gap_ce_ce2)},
                     {"ce_expshrink", opt_num(rep.consistency->gap_ce_expshrink)},
                     {"ce2_expshrink", opt_num(rep.consistency->gap_ce2_expshrink)}};
        j["consistency"] = c;
    } else {
        j["consistency"] = nullptr;
    }

    njson errs = njson::object();
    for (const auto& [k, v] : rep.errors) errs[k] = v;
    j["errors"] = errs;
    j["warnings"] = rep.warnings;

    return j.dump(2) + "\n";
}

namespace {

std::string csv_cell(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string series_to_csv_string(const EquivalenceReport& rep) {
    const std::vector<double>* a_n = rep.ce ? &rep.ce->per_n_exponents : nullptr;
    const std::vector<double>* ce2_log = rep.ce2 ? &rep.ce2->per_n_min_log : nullptr;
    const std::vector<double>* sr_d = rep.sr ? &rep.sr->distance_series : nullptr;
    std::vector<double> exp_log;
    if (rep.expshrink)
        for (double d : rep.expshrink->per_n_max_diam)
            exp_log.push_back(d > 0 ? std::log(d) : -std::numeric_limits<double>::infinity());

    std::size_t rows = 0;
    if (a_n) rows = std::max(rows, a_n->size());
    if (ce2_log) rows = std::max(rows, ce2_log->size());
    if (sr_d) rows = std::max(rows, sr_d->size());
    rows = std::max(rows, exp_log.size());

    std::string out = "n,a_n,ce2_min_log,expshrink_max_log_diam,sr_dist\r\n";
    for (std::size_t i = 0; i < rows; ++i) {
        out += std::to_string(i + 1);
        out += ",";
        if (a_n && i < a_n->size()) out += csv_cell((*a_n)[i]);
        out += ",";
        if (ce2_log && i < ce2_log->size()) out += csv_cell((*ce2_log)[i]);
        out += ",";
        if (i < exp_log.size()) out += csv_cell(exp_log[i]);
        out += ",";
        if (sr_d && i < sr_d->size()) out += csv_cell((*sr_d)[i]);
        out += "\r\n";
    }
    return out;
}

namespace {

struct SvgSeries {
    const char* label;
    const char* color;
    std::vector<double> values; // y per n (1-based)
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

} // namespace

std::string plots_to_svg_string(const EquivalenceReport& rep) {
    std::vector<SvgSeries> series;
    if (rep.ce) series.push_back({"a_n", "#1f77b4", rep.ce->per_n_exponents});
    if (rep.ce2) series.push_back({"ce2_min_log", "#d62728", rep.ce2->per_n_min_log});
    if (rep.expshrink) {
        std::vector<double> v;
        for (double d : rep.expshrink->per_n_max_diam)
            v.push_back(d > 0 ? std::log(d) : std::numeric_limits<double>::quiet_NaN());
        series.push_back({"expshrink_max_log_diam", "#2ca02c", v});
    }
    if (rep.sr) series.push_back({"sr_dist", "#9467bd", rep.sr->distance_series});

    const double W = 640, H = 420, L = 60, B = 40, T = 20, R = 20;
    double xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (!std::isfinite(s.values[i])) continue;
            if (!any) {
                ymin = ymax = s.values[i];
                any = true;
            }
            ymin = std::min(ymin, s.values[i]);
            ymax = std::max(ymax, s.values[i]);
            xmax = std::max(xmax, double(i + 1));
        }
    if (!any) {
        ymin = 0;
        ymax = 1;
    }
    if (ymax - ymin < 1e-12) {
        ymax += 1;
        ymin -= 1;
    }

    auto xpix = [&](double n) { return L + (W - L - R) * (n - 1) / std::max(1.0, xmax - 1); };
    auto ypix = [&](double v) { return H - B - (H - B - T) * (v - ymin) / (ymax - ymin); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
                      "viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    svg += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) +
           "\" y2=\"" + fmt(H - B) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" +
           fmt(H - B) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 8) +
           "\" font-size=\"12\" text-anchor=\"middle\">n</text>\n";
    svg += "<text x=\"" + fmt(L) + "\" y=\"" + fmt(T - 6) + "\" font-size=\"12\">" +
           fmt(ymax) + "</text>\n";
    svg += "<text x=\"" + fmt(L) + "\" y=\"" + fmt(H - B + 14) + "\" font-size=\"12\">" +
           fmt(ymin) + "</text>\n";

    double ly = T + 10;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (!std::isfinite(s.values[i])) continue;
            pts += fmt(xpix(double(i + 1))) + "," + fmt(ypix(s.values[i])) + " ";
        }
        if (!pts.empty()) {
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(s.color) +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
        svg += "<text x=\"" + fmt(W - R - 200) + "\" y=\"" + fmt(ly) +
               "\" font-size=\"12\" fill=\"" + s.color + "\">" + s.label + "</text>\n";
        ly += 14;
    }
    svg += "</svg>\n";
    return svg;
}

EmitPaths emit_report(const EquivalenceReport& rep, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    EmitPaths paths;
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("emit_report: cannot create output directory " + dir.string());

    std::string json_text = report_to_json_string(rep, cfg);
    validate_against_schema(json_text, report_schema_json());

    auto write_file = [](const fs::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("emit_report: cannot open " + p.string());
        out << content;
        if (!out) throw IoError("emit_report: write failed for " + p.string());
    };

    paths.report_json = dir / "report.json";
    paths.series_csv = dir / "series.csv";
    paths.plots_svg = dir / "plots.svg";
    write_file(paths.report_json, json_text);
    write_file(paths.series_csv, series_to_csv_string(rep));
    write_file(paths.plots_svg, plots_to_svg_string(rep));
    return paths;
}

} // namespace celab
