#include "celab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace celab {

using njson = nlohmann::json;

namespace {

void check_keys(const njson& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ConfigError("config error at " + path + "/" + it.key() + ": unknown key");
    }
}

void require_type(const njson& v, njson::value_t t, const std::string& path) {
    bool ok = v.type() == t ||
              (t == njson::value_t::number_float && v.is_number()) ||
              (t == njson::value_t::number_integer && v.is_number_integer()) ||
              (t == njson::value_t::number_unsigned && v.is_number_unsigned());
    if (!ok) throw ConfigError("config error at " + path + ": unexpected type");
}

Complex parse_complex_pair(const njson& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("config error at " + path + ": expected [re, im]");
    return Complex(v[0].get<double>(), v[1].get<double>());
}

Polynomial parse_coeffs(const njson& v, const std::string& path) {
    if (!v.is_array() || v.empty())
        throw ConfigError("config error at " + path + ": expected a nonempty coefficient array");
    std::vector<Complex> c;
    for (std::size_t i = 0; i < v.size(); ++i)
        c.push_back(parse_complex_pair(v[i], path + "/" + std::to_string(i)));
    return Polynomial(std::move(c));
}

SpherePoint parse_point_json(const njson& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return SpherePoint::infinity();
        throw ConfigError("config error at " + path + ": expected [re, im] or \"inf\"");
    }
    return SpherePoint(parse_complex_pair(v, path));
}

MapSpec parse_map_spec(const njson& m, const std::string& path) {
    require_type(m, njson::value_t::object, path);
    check_keys(m, {"numerator", "denominator", "julia_overrides", "name", "param"}, path);
    MapSpec spec;
    if (m.contains("param")) spec.param = parse_complex_pair(m["param"], path + "/param");
    if (m.contains("name")) {
        if (m.contains("numerator") || m.contains("denominator"))
            throw ConfigError("config error at " + path +
                              ": give either a registry name or explicit coefficients");
        spec = registry_map(m["name"].get<std::string>(), spec.param);
    } else {
        if (!m.contains("numerator"))
            throw ConfigError("config error at " + path + "/numerator: required");
        spec.numerator = parse_coeffs(m["numerator"], path + "/numerator");
        if (m.contains("denominator"))
            spec.denominator = parse_coeffs(m["denominator"], path + "/denominator");
    }
    if (m.contains("julia_overrides")) {
        const njson& ovs = m["julia_overrides"];
        require_type(ovs, njson::value_t::array, path + "/julia_overrides");
        for (std::size_t i = 0; i < ovs.size(); ++i) {
            std::string p = path + "/julia_overrides/" + std::to_string(i);
            require_type(ovs[i], njson::value_t::object, p);
            check_keys(ovs[i], {"point", "in_julia"}, p);
            if (!ovs[i].contains("point") || !ovs[i].contains("in_julia"))
                throw ConfigError("config error at " + p + ": point and in_julia required");
            spec.julia_overrides.push_back(
                {parse_point_json(ovs[i]["point"], p + "/point"),
                 ovs[i]["in_julia"].get<bool>()});
        }
    }
    // Early structural validation so bad specs fail as config errors.
    try {
        RationalMap probe(spec.numerator, spec.denominator);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config error at ") + path + ": " + e.what());
    }
    return spec;
}

int get_positive_int(const njson& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw ConfigError("config error at " + path + ": expected an integer >= 1");
    return static_cast<int>(v.get<long long>());
}

double get_positive_double(const njson& v, const std::string& path) {
    if (!v.is_number() || !(v.get<double>() > 0.0))
        throw ConfigError("config error at " + path + ": expected a positive number");
    return v.get<double>();
}

} // namespace

SpherePoint parse_point(const std::string& text) {
    if (text == "inf") return SpherePoint::infinity();
    std::size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("point: expected \"re,im\" or \"inf\", got \"" + text + "\"");
    try {
        double re = std::stod(text.substr(0, comma));
        double im = std::stod(text.substr(comma + 1));
        return SpherePoint(re, im);
    } catch (const std::exception&) {
        throw ConfigError("point: could not parse \"" + text + "\"");
    }
}

RunConfig parse_config(const std::string& json_text) {
    njson j;
    try {
        j = njson::parse(json_text);
    } catch (const njson::parse_error& e) {
        throw ConfigError(std::string("config error: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config error at /: expected an object");
    check_keys(j,
               {"map", "horizons", "scale", "tce", "expshrink", "samples", "julia_horizon",
                "sr", "seed", "branch_cap"},
               "");

    RunConfig cfg;
    if (!j.contains("map")) throw ConfigError("config error at /map: required");
    cfg.map = parse_map_spec(j["map"], "/map");

    if (j.contains("horizons")) {
        const njson& h = j["horizons"];
        require_type(h, njson::value_t::object, "/horizons");
        check_keys(h, {"forward", "backward", "cover"}, "/horizons");
        if (h.contains("forward")) cfg.forward_N = get_positive_int(h["forward"], "/horizons/forward");
        if (h.contains("backward"))
            cfg.backward_n = get_positive_int(h["backward"], "/horizons/backward");
        if (h.contains("cover")) cfg.cover_depth = get_positive_int(h["cover"], "/horizons/cover");
    }
    if (j.contains("scale")) {
        const njson& s = j["scale"];
        require_type(s, njson::value_t::object, "/scale");
        check_keys(s, {"R", "R_prime"}, "/scale");
        if (s.contains("R")) cfg.scale_R = get_positive_double(s["R"], "/scale/R");
        if (s.contains("R_prime"))
            cfg.scale_R_prime = get_positive_double(s["R_prime"], "/scale/R_prime");
        try {
            Scale probe(cfg.scale_R, cfg.scale_R_prime);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("config error at /scale: ") + e.what());
        }
    }
    if (j.contains("tce")) {
        const njson& t = j["tce"];
        require_type(t, njson::value_t::object, "/tce");
        check_keys(t, {"r", "M", "P", "z"}, "/tce");
        if (t.contains("r")) cfg.tce_r = get_positive_double(t["r"], "/tce/r");
        if (t.contains("M")) {
            if (!t["M"].is_number_integer() || t["M"].get<long long>() < 0)
                throw ConfigError("config error at /tce/M: expected an integer >= 0");
            cfg.tce_M = static_cast<int>(t["M"].get<long long>());
        }
        if (t.contains("P")) cfg.tce_P = get_positive_int(t["P"], "/tce/P");
        if (t.contains("z")) cfg.tce_z = parse_point_json(t["z"], "/tce/z");
    }
    if (j.contains("expshrink")) {
        const njson& e = j["expshrink"];
        require_type(e, njson::value_t::object, "/expshrink");
        check_keys(e, {"r", "anchor"}, "/expshrink");
        if (e.contains("r")) cfg.expshrink_r = get_positive_double(e["r"], "/expshrink/r");
        if (e.contains("anchor")) {
            require_type(e["anchor"], njson::value_t::string, "/expshrink/anchor");
            cfg.expshrink_anchor = e["anchor"].get<std::string>();
            if (cfg.expshrink_anchor != "auto" && cfg.expshrink_anchor != "random") {
                try {
                    parse_point(cfg.expshrink_anchor);
                } catch (const ConfigError&) {
                    throw ConfigError(
                        "config error at /expshrink/anchor: expected auto, random or re,im");
                }
            }
        }
    }
    if (j.contains("samples")) {
        const njson& s = j["samples"];
        require_type(s, njson::value_t::object, "/samples");
        check_keys(s, {"base", "branch", "circle", "julia"}, "/samples");
        if (s.contains("base")) cfg.base_samples = get_positive_int(s["base"], "/samples/base");
        if (s.contains("branch"))
            cfg.branch_samples = get_positive_int(s["branch"], "/samples/branch");
        if (s.contains("circle"))
            cfg.circle_samples = get_positive_int(s["circle"], "/samples/circle");
        if (s.contains("julia")) cfg.julia_samples = get_positive_int(s["julia"], "/samples/julia");
    }
    if (j.contains("julia_horizon"))
        cfg.julia_horizon = get_positive_int(j["julia_horizon"], "/julia_horizon");
    if (j.contains("sr")) {
        const njson& s = j["sr"];
        require_type(s, njson::value_t::object, "/sr");
        check_keys(s, {"C"}, "/sr");
        if (s.contains("C") && !s["C"].is_null())
            cfg.sr_C = get_positive_double(s["C"], "/sr/C");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ConfigError("config error at /seed: expected an unsigned integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("branch_cap")) {
        if (!j["branch_cap"].is_number_integer() || j["branch_cap"].get<long long>() < 1)
            throw ConfigError("config error at /branch_cap: expected an integer >= 1");
        cfg.branch_cap = j["branch_cap"].get<long long>();
    }
    return cfg;
}

std::vector<RegistryEntry> registry() {
    return {
        {"chebyshev", "z^2 - 2, Julia set [-2, 2], critical orbit lands on the fixed point 2"},
        {"misiurewicz_i", "z^2 + i, critical orbit preperiodic to a repelling 2-cycle"},
        {"power2", "z^2, hyperbolic, Crit'(f) empty"},
        {"basilica", "z^2 - 1, superattracting 2-cycle, Crit'(f) empty"},
        {"multicrit", "3z^4 - 4z^3 + c, distinct finite multiplicities (param c, default 0)"},
    };
}

MapSpec registry_map(const std::string& name, std::optional<Complex> param) {
    MapSpec spec;
    spec.name = name;
    if (param && name != "multicrit")
        throw ConfigError("registry: param is only supported for multicrit");
    if (name == "chebyshev") {
        spec.numerator = Polynomial{std::vector<Complex>{{-2, 0}, {0, 0}, {1, 0}}};
    } else if (name == "misiurewicz_i") {
        spec.numerator = Polynomial{std::vector<Complex>{{0, 1}, {0, 0}, {1, 0}}};
    } else if (name == "power2") {
        spec.numerator = Polynomial{std::vector<Complex>{{0, 0}, {0, 0}, {1, 0}}};
    } else if (name == "basilica") {
        spec.numerator = Polynomial{std::vector<Complex>{{-1, 0}, {0, 0}, {1, 0}}};
    } else if (name == "multicrit") {
        Complex c = param.value_or(Complex(0, 0));
        spec.param = c;
        spec.numerator =
            Polynomial{std::vector<Complex>{c, {0, 0}, {0, 0}, {-4, 0}, {3, 0}}};
    } else {
        throw ConfigError("registry: unknown map \"" + name + "\"");
    }
    return spec;
}

namespace {

std::optional<SpherePoint> resolve_expshrink_anchor(const RunConfig& cfg, const RationalMap& f) {
    if (cfg.expshrink_anchor == "random") return std::nullopt;
    if (cfg.expshrink_anchor == "auto") return julia_sample(f, 1, cfg.seed)[0];
    return parse_point(cfg.expshrink_anchor);
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(a, b); }

} // namespace

EquivalenceReport run_part(const RunConfig& cfg, RunPart part,
                           std::optional<SpherePoint> orbit_z0) {
    RationalMap f(cfg.map.numerator, cfg.map.denominator);
    EquivalenceReport rep;
    rep.degree = f.degree();
    rep.crit = julia_classify(f, critical_points(f), cfg.julia_horizon,
                              cfg.map.julia_overrides);
    for (const auto& e : rep.crit.entries)
        if (e.warning)
            rep.warnings.push_back(
                "julia_classify: membership undecided at the horizon; kept in Crit'");

    if (part == RunPart::orbit) {
        if (!orbit_z0) throw ConfigError("orbit: z0 required");
        rep.orbit_z0 = orbit_z0;
        rep.orbit = forward_orbit(f, *orbit_z0, cfg.forward_N);
        return rep;
    }

    const bool tolerant = (part == RunPart::equiv);
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (!tolerant) throw;
            rep.errors[name] = e.what();
        }
    };

    auto prime = rep.crit.crit_prime();
    if (prime.empty() && part != RunPart::tce) {
        if (!tolerant)
            throw DomainError("Crit'(f) is empty: the condition is vacuous for this map");
        rep.vacuous = true;
        rep.verdict_note = "hyperbolic: vacuous";
        return rep;
    }

    auto run_ce = [&]() {
        for (const auto& e : prime)
            rep.ce_by_crit.emplace_back(e.point, ce_exponent(f, rep.crit, e.point, cfg.forward_N));
        const CEEstimate* binding = nullptr;
        for (const auto& [c, est] : rep.ce_by_crit)
            if (!binding || est.lambda1 < binding->lambda1) binding = &est;
        if (binding) rep.ce = *binding;
    };
    auto run_ce2 = [&]() {
        std::string first_error;
        for (const auto& e : prime) {
            try {
                rep.ce2_by_crit.emplace_back(
                    e.point,
                    ce2_min_derivative(f, rep.crit, e.point, cfg.backward_n, cfg.branch_cap,
                                       cfg.threads));
            } catch (const Error& err) {
                if (first_error.empty()) first_error = err.what();
            }
        }
        if (rep.ce2_by_crit.empty()) throw NumericError("ce2: " + first_error);
        const CE2Estimate* binding = nullptr;
        for (const auto& [c, est] : rep.ce2_by_crit)
            if (!binding || est.lambda2 < binding->lambda2) binding = &est;
        rep.ce2 = *binding;
    };
    auto run_sr = [&]() {
        std::vector<double> agg;
        for (const auto& e : prime) {
            auto d = sr_distances(f, rep.crit, e.point, cfg.forward_N);
            if (d.exact_hit_n)
                throw NumericError("sr: SR violation, exact critical hit at n = " +
                                   std::to_string(*d.exact_hit_n));
            if (agg.empty())
                agg = d.values;
            else
                for (std::size_t i = 0; i < agg.size(); ++i)
                    agg[i] = std::min(agg[i], d.values[i]);
            rep.sr_by_crit.emplace_back(e.point, std::move(d));
        }
        double C = cfg.sr_C.value_or(*std::min_element(agg.begin(), agg.end()));
        rep.sr = sr_alpha_fit(agg, C);
    };
    auto run_first_return = [&]() {
        rep.first_return = first_return_bound(f, rep.crit, cfg.scale_R, cfg.forward_N);
    };
    auto run_expshrink = [&]() {
        ExpShrinkParams p;
        p.r = cfg.expshrink_r;
        p.depth = cfg.cover_depth;
        p.base_samples = cfg.base_samples;
        p.branch_samples = cfg.branch_samples;
        p.circle_samples = cfg.circle_samples;
        p.anchor = resolve_expshrink_anchor(cfg, f);
        p.seed = cfg.seed;
        p.threads = cfg.threads;
        rep.expshrink = expshrink_estimate(f, p);
    };
    auto run_tce = [&]() {
        auto julia = julia_sample(f, cfg.julia_samples, cfg.seed);
        SpherePoint z = cfg.tce_z.value_or(julia[0]);
        TCEParams tp{cfg.tce_M, cfg.tce_P, cfg.tce_r};
        rep.tce = tce_check(f, rep.crit, z, tp, cfg.cover_depth, cfg.circle_samples, julia);
    };

    switch (part) {
        case RunPart::ce: run_ce(); break;
        case RunPart::ce2: run_ce2(); break;
        case RunPart::sr: run_sr(); break;
        case RunPart::expshrink: run_expshrink(); break;
        case RunPart::tce: run_tce(); break;
        case RunPart::equiv: {
            guarded("ce", run_ce);
            guarded("ce2", run_ce2);
            guarded("sr", run_sr);
            guarded("first_return", run_first_return);
            guarded("expshrink", run_expshrink);
            Consistency cons;
            int mu_max = rep.crit.mu_max();
            if (rep.ce && rep.ce->observed) cons.e_ce = std::log(rep.ce->lambda1);
            if (rep.ce2 && rep.ce2->observed)
                cons.e_ce2 = mu_max * std::log(rep.ce2->lambda2);
            if (rep.expshrink && rep.expshrink->observed)
                cons.e_expshrink = std::log(rep.expshrink->lambda_exp);
            if (cons.e_ce && cons.e_ce2)
                cons.gap_ce_ce2 = relative_gap(*cons.e_ce, *cons.e_ce2);
            if (cons.e_ce && cons.e_expshrink)
                cons.gap_ce_expshrink = relative_gap(*cons.e_ce, *cons.e_expshrink);
            if (cons.e_ce2 && cons.e_expshrink)
                cons.gap_ce2_expshrink = relative_gap(*cons.e_ce2, *cons.e_expshrink);
            rep.consistency = cons;
            break;
        }
        case RunPart::orbit: break; // handled above
    }
    return rep;
}

} // namespace celab
