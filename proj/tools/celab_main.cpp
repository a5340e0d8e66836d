#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "celab/lab.hpp"

namespace {

using namespace celab;

struct Common {
    std::string config_path;
    std::string out_dir = "out";
    std::string map_name;
    std::string param_str;
    std::uint64_t seed = 0;
    int threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "RunConfig JSON file");
    c.out_opt = cmd->add_option("--out", c.out_dir, "output directory (default: out)");
    c.seed_opt = cmd->add_option("--seed", c.seed, "random seed");
    c.threads_opt =
        cmd->add_option("--threads", c.threads, "worker threads (0 = sequential)");
    cmd->add_option("--map", c.map_name, "registry map name");
    cmd->add_option("--param", c.param_str, "family parameter re,im (multicrit)");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig build_config(const Common& c) {
    RunConfig cfg;
    bool have_map = false;
    if (!c.config_path.empty()) {
        cfg = parse_config(slurp(c.config_path));
        have_map = true;
    }
    if (!c.map_name.empty()) {
        std::optional<Complex> param;
        if (!c.param_str.empty()) {
            SpherePoint p = parse_point(c.param_str);
            param = p.value();
        }
        cfg.map = registry_map(c.map_name, param);
        have_map = true;
    }
    if (!have_map) throw ConfigError("no map selected: pass --config FILE or --map NAME");
    if (c.seed_opt && c.seed_opt->count() > 0) cfg.seed = c.seed;
    if (c.threads_opt && c.threads_opt->count() > 0) cfg.threads = c.threads;
    if (c.out_opt && c.out_opt->count() > 0) cfg.out_dir = c.out_dir;
    return cfg;
}

void print_emitted(const EmitPaths& paths) {
    std::cout << "wrote " << paths.report_json.string() << ", "
              << paths.series_csv.string() << ", " << paths.plots_svg.string() << "\n";
}

std::string point_str(const SpherePoint& p) {
    if (p.is_inf()) return "inf";
    std::ostringstream ss;
    ss << std::setprecision(17) << p.value().real() << "," << p.value().imag();
    return ss.str();
}

int run_and_emit(const RunConfig& cfg, RunPart part, std::optional<SpherePoint> z0) {
    EquivalenceReport rep = run_part(cfg, part, z0);
    EmitPaths paths = emit_report(rep, cfg);
    std::cout << std::setprecision(12);
    switch (part) {
        case RunPart::orbit:
            std::cout << "orbit: " << rep.orbit->points.size() - 1 << " steps from "
                      << point_str(*rep.orbit_z0) << "\n";
            break;
        case RunPart::ce:
            std::cout << "ce: lambda1 = " << rep.ce->lambda1 << ", C1 = " << rep.ce->C1
                      << ", observed = " << (rep.ce->observed ? "yes" : "no") << "\n";
            break;
        case RunPart::ce2:
            std::cout << "ce2: lambda2 = " << rep.ce2->lambda2 << ", C2 = " << rep.ce2->C2
                      << ", observed = " << (rep.ce2->observed ? "yes" : "no") << "\n";
            break;
        case RunPart::sr:
            std::cout << "sr: alpha = " << rep.sr->alpha << ", C = " << rep.sr->C
                      << ", witness_n = " << rep.sr->witness_n << ", min distance = "
                      << *std::min_element(rep.sr->distance_series.begin(),
                                           rep.sr->distance_series.end())
                      << "\n";
            break;
        case RunPart::expshrink:
            std::cout << "expshrink: lambda_exp = " << rep.expshrink->lambda_exp
                      << ", log = " << std::log(rep.expshrink->lambda_exp)
                      << ", unreliable = " << (rep.expshrink->unreliable ? "yes" : "no")
                      << "\n";
            break;
        case RunPart::tce:
            std::cout << "tce: " << (rep.tce->pass ? "pass" : "fail") << ", sequence length "
                      << rep.tce->chosen_nj.size() << "\n";
            break;
        case RunPart::equiv: {
            if (rep.vacuous) {
                std::cout << "equiv: " << rep.verdict_note << "\n";
                break;
            }
            std::cout << "equiv:";
            if (rep.ce) std::cout << " log l1 = " << std::log(rep.ce->lambda1);
            if (rep.ce2) std::cout << ", log l2 = " << std::log(rep.ce2->lambda2);
            if (rep.expshrink)
                std::cout << ", log lExp = " << std::log(rep.expshrink->lambda_exp);
            if (rep.consistency && rep.consistency->gap_ce_ce2)
                std::cout << ", gap(ce, ce2) = " << *rep.consistency->gap_ce_ce2;
            if (rep.consistency && rep.consistency->gap_ce_expshrink)
                std::cout << ", gap(ce, exp) = " << *rep.consistency->gap_ce_expshrink;
            if (rep.consistency && rep.consistency->gap_ce2_expshrink)
                std::cout << ", gap(ce2, exp) = " << *rep.consistency->gap_ce2_expshrink;
            std::cout << "\n";
            for (const auto& [k, v] : rep.errors)
                std::cout << "  estimator " << k << " absent: " << v << "\n";
            break;
        }
    }
    print_emitted(paths);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"celab: numerical laboratory for Collet-Eckmann conditions of rational maps"};
    app.require_subcommand(1);

    Common c_orbit, c_ce, c_ce2, c_sr, c_exp, c_tce, c_equiv;
    std::string orbit_z0;
    int forward_N = 0, backward_n = 0, depth = 0, tce_M = -1, tce_P = 0, circle = 0;
    int base_samples = 0, branch_samples = 0;
    long long cap = 0;
    double sr_C = 0.0, exp_r = 0.0, tce_r = 0.0;
    std::string exp_anchor, tce_z;

    auto* orbit_cmd = app.add_subcommand("orbit", "forward orbit and log-derivative prefix");
    add_common(orbit_cmd, c_orbit);
    orbit_cmd->add_option("--z0", orbit_z0, "start point re,im or inf")->required();
    auto* orbit_N = orbit_cmd->add_option("-N,--steps", forward_N, "orbit length");

    auto* ce_cmd = app.add_subcommand("ce", "Collet-Eckmann exponent along critical orbits");
    add_common(ce_cmd, c_ce);
    auto* ce_N = ce_cmd->add_option("-N,--steps", forward_N, "forward horizon");

    auto* ce2_cmd = app.add_subcommand("ce2", "second Collet-Eckmann backward-tree minimum");
    add_common(ce2_cmd, c_ce2);
    auto* ce2_n = ce2_cmd->add_option("-n,--depth", backward_n, "backward depth");
    auto* ce2_cap = ce2_cmd->add_option("--cap", cap, "branch cap");

    auto* sr_cmd = app.add_subcommand("sr", "slow-recurrence distance series and alpha fit");
    add_common(sr_cmd, c_sr);
    auto* sr_N = sr_cmd->add_option("-N,--steps", forward_N, "forward horizon");
    auto* sr_C_opt = sr_cmd->add_option("--C", sr_C, "constant C (default: min distance)");

    auto* exp_cmd = app.add_subcommand("expshrink", "exponential shrinking of components");
    add_common(exp_cmd, c_exp);
    auto* exp_r_opt = exp_cmd->add_option("--r", exp_r, "base disk radius (chordal)");
    auto* exp_depth = exp_cmd->add_option("--depth", depth, "pullback depth");
    auto* exp_anchor_opt =
        exp_cmd->add_option("--anchor", exp_anchor, "auto | random | re,im");
    auto* exp_base = exp_cmd->add_option("--base-samples", base_samples, "Julia base points");
    auto* exp_branch =
        exp_cmd->add_option("--branch-samples", branch_samples, "backward branches per base");
    auto* exp_circle = exp_cmd->add_option("--circle-samples", circle, "boundary samples");

    auto* tce_cmd = app.add_subcommand("tce", "topological Collet-Eckmann counting test");
    add_common(tce_cmd, c_tce);
    auto* tce_z_opt = tce_cmd->add_option("--z", tce_z, "base point re,im or inf");
    auto* tce_r_opt = tce_cmd->add_option("--r", tce_r, "disk radius (chordal)");
    auto* tce_M_opt = tce_cmd->add_option("-M", tce_M, "critical-component budget");
    auto* tce_P_opt = tce_cmd->add_option("-P", tce_P, "density bound n_j <= P j");
    auto* tce_N = tce_cmd->add_option("-N,--horizon", depth, "horizon");
    auto* tce_circle = tce_cmd->add_option("--circle-samples", circle, "boundary samples");

    auto* equiv_cmd = app.add_subcommand("equiv", "run all estimators and compare exponents");
    add_common(equiv_cmd, c_equiv);
    auto* eq_N = equiv_cmd->add_option("-N,--steps", forward_N, "forward horizon");
    auto* eq_n = equiv_cmd->add_option("-n,--backward", backward_n, "backward depth");
    auto* eq_depth = equiv_cmd->add_option("--depth", depth, "cover depth");

    auto* registry_cmd = app.add_subcommand("registry", "list built-in benchmark maps");

    try {
        app.parse(argc, argv);

        if (registry_cmd->parsed()) {
            for (const auto& e : registry()) {
                MapSpec spec = registry_map(e.name, std::nullopt);
                std::cout << e.name << ": " << e.description << "\n  numerator:";
                for (const auto& co : spec.numerator.coeffs())
                    std::cout << " [" << co.real() << "," << co.imag() << "]";
                std::cout << "\n  denominator:";
                for (const auto& co : spec.denominator.coeffs())
                    std::cout << " [" << co.real() << "," << co.imag() << "]";
                std::cout << "\n";
            }
            return 0;
        }

        if (orbit_cmd->parsed()) {
            RunConfig cfg = build_config(c_orbit);
            if (orbit_N->count()) cfg.forward_N = forward_N;
            return run_and_emit(cfg, RunPart::orbit, parse_point(orbit_z0));
        }
        if (ce_cmd->parsed()) {
            RunConfig cfg = build_config(c_ce);
            if (ce_N->count()) cfg.forward_N = forward_N;
            return run_and_emit(cfg, RunPart::ce, {});
        }
        if (ce2_cmd->parsed()) {
            RunConfig cfg = build_config(c_ce2);
            if (ce2_n->count()) cfg.backward_n = backward_n;
            if (ce2_cap->count()) cfg.branch_cap = cap;
            return run_and_emit(cfg, RunPart::ce2, {});
        }
        if (sr_cmd->parsed()) {
            RunConfig cfg = build_config(c_sr);
            if (sr_N->count()) cfg.forward_N = forward_N;
            if (sr_C_opt->count()) cfg.sr_C = sr_C;
            return run_and_emit(cfg, RunPart::sr, {});
        }
        if (exp_cmd->parsed()) {
            RunConfig cfg = build_config(c_exp);
            if (exp_r_opt->count()) cfg.expshrink_r = exp_r;
            if (exp_depth->count()) cfg.cover_depth = depth;
            if (exp_anchor_opt->count()) cfg.expshrink_anchor = exp_anchor;
            if (exp_base->count()) cfg.base_samples = base_samples;
            if (exp_branch->count()) cfg.branch_samples = branch_samples;
            if (exp_circle->count()) cfg.circle_samples = circle;
            return run_and_emit(cfg, RunPart::expshrink, {});
        }
        if (tce_cmd->parsed()) {
            RunConfig cfg = build_config(c_tce);
            if (tce_z_opt->count()) cfg.tce_z = parse_point(tce_z);
            if (tce_r_opt->count()) cfg.tce_r = tce_r;
            if (tce_M_opt->count()) cfg.tce_M = tce_M;
            if (tce_P_opt->count()) cfg.tce_P = tce_P;
            if (tce_N->count()) cfg.cover_depth = depth;
            if (tce_circle->count()) cfg.circle_samples = circle;
            return run_and_emit(cfg, RunPart::tce, {});
        }
        if (equiv_cmd->parsed()) {
            RunConfig cfg = build_config(c_equiv);
            if (eq_N->count()) cfg.forward_N = forward_N;
            if (eq_n->count()) cfg.backward_n = backward_n;
            if (eq_depth->count()) cfg.cover_depth = depth;
            return run_and_emit(cfg, RunPart::equiv, {});
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
