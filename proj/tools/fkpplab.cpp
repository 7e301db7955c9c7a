// fkpplab: eigenvalue, steady-state, and sweep experiments for the 1-D
// fractional Fisher-KPP problem on fragmented domains.
//
// Exit codes: 0 success, 2 assertion/outcome mismatch, 3 configuration error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fkpp/fkpp.hpp"

namespace {

struct Overrides {
    std::optional<double> alpha;
    std::optional<double> mu;
    std::optional<double> h;
    std::optional<std::string> out;
};

fkpp::SweepConfig make_config(const std::string& config_path, const Overrides& ov) {
    fkpp::SweepConfig cfg = fkpp::load_config(config_path);
    if (ov.alpha) cfg.alphas = {*ov.alpha};
    if (ov.mu) {
        cfg.mus = {*ov.mu};
        if (cfg.two_patch_spec) cfg.two_patch_spec->mu = *ov.mu;
    }
    if (ov.h) cfg.h = *ov.h;
    if (ov.out) cfg.out_dir = *ov.out;
    cfg.validate();
    return cfg;
}

fkpp::Domain1D scenario_domain(const fkpp::SweepConfig& cfg) { return cfg.domain(); }

int run_eig(const fkpp::SweepConfig& cfg, const std::string& dump_path) {
    const fkpp::Alpha a(cfg.alphas.front());
    const fkpp::Domain1D dom = scenario_domain(cfg);
    const fkpp::Grid g = fkpp::build_grid(dom, cfg.h);
    const fkpp::OperatorMatrix op = fkpp::assemble(g, a);
    if (!dump_path.empty()) fkpp::dump_operator(op, dump_path);
    const fkpp::EigenResult e = fkpp::principal_eigen(op);
    nlohmann::json j{{"scenario", cfg.scenario},
                     {"alpha", a.value()},
                     {"h", cfg.h},
                     {"nodes", g.size()},
                     {"xi", e.xi},
                     {"lambda", e.lambda},
                     {"iterations", e.iterations},
                     {"residual", e.residual},
                     {"symmetrization_defect", op.symmetrization_defect}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_steady(const fkpp::SweepConfig& cfg, const std::string& start) {
    const fkpp::Alpha a(cfg.alphas.front());
    const fkpp::Domain1D dom = scenario_domain(cfg);
    const fkpp::Grid g = fkpp::build_grid(dom, cfg.h);
    const fkpp::OperatorMatrix op = fkpp::assemble(g, a);
    const auto kind = start == "sub" ? fkpp::StartKind::Sub : fkpp::StartKind::Super;
    const fkpp::SteadyState s =
        fkpp::monotone_solve(op, kind, 1e-10, 200000, cfg.march.extinction_threshold);
    std::filesystem::create_directories(cfg.out_dir);
    fkpp::write_final_state_csv(cfg.out_dir + "/steady_" + cfg.scenario + ".csv", g, s.n,
                                        a);
    nlohmann::json j{
        {"scenario", cfg.scenario},
        {"alpha", a.value()},
        {"outcome", s.outcome == fkpp::Outcome::Persistence ? "persistence" : "extinction"},
        {"sup_n", s.n.cwiseAbs().maxCoeff()},
        {"residual", s.residual},
        {"iterations", s.iterations}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_march(const fkpp::SweepConfig& cfg) {
    const fkpp::Alpha a(cfg.alphas.front());
    const fkpp::Domain1D dom = scenario_domain(cfg);
    const fkpp::Grid g = fkpp::build_grid(dom, cfg.h);
    const fkpp::OperatorMatrix op = fkpp::assemble(g, a);
    const fkpp::Trajectory tr = fkpp::time_march(op, fkpp::left_patch_indicator(g), cfg.march);
    std::filesystem::create_directories(cfg.out_dir);
    fkpp::write_trajectory_csv(cfg.out_dir + "/march_" + cfg.scenario + ".csv", g, tr);
    fkpp::write_final_state_csv(cfg.out_dir + "/march_final_" + cfg.scenario + ".csv", g,
                                        tr.final_state.n, a);
    nlohmann::json j{{"scenario", cfg.scenario},
                     {"alpha", a.value()},
                     {"outcome", tr.final_state.outcome == fkpp::Outcome::Persistence
                                     ? "persistence"
                                     : "extinction"},
                     {"sup_final", tr.final_state.n.cwiseAbs().maxCoeff()},
                     {"settled_at", tr.settled_at},
                     {"dt_used", tr.dt_used},
                     {"snapshots", tr.snapshots.size()}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D fractional Fisher-KPP laboratory"};
    app.set_help_flag("--help", "print usage");  // frees --h for the mesh override
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--alpha", ov.alpha, "override: single alpha value");
    app.add_option("--mu", ov.mu, "override: single mu value");
    app.add_option("--h", ov.h, "override: mesh width");
    app.add_option("--out", ov.out, "override: output directory");

    auto* eig = app.add_subcommand("eig", "principal eigenpair of the scenario domain");
    std::string dump_path;
    eig->add_option("--dump", dump_path, "binary operator dump path");
    auto* steady = app.add_subcommand("steady", "monotone-iteration steady state");
    std::string start = "super";
    steady->add_option("--start", start, "iteration start: sub | super")
        ->check(CLI::IsMember({"sub", "super"}));
    auto* march = app.add_subcommand("march", "semi-implicit time march");
    auto* sweep_mu_cmd = app.add_subcommand("sweep-mu", "xi(mu) sweep with monotonicity checks");
    auto* sweep_alpha_cmd =
        app.add_subcommand("sweep-alpha", "xi(alpha) sweep with the classical-limit report");
    auto* sweep_joint_cmd =
        app.add_subcommand("sweep-joint", "staircase toward (mu,alpha)->(0,1) hitting xi-star");
    double xi_star = 0.0;
    bool xi_star_mid = false;
    sweep_joint_cmd->add_option("--xi-star", xi_star, "target eigenvalue");
    sweep_joint_cmd->add_flag("--midpoint", xi_star_mid,
                              "target the midpoint of the admissible range");
    auto* gap_cmd = app.add_subcommand("gap-exponent", "far-separation gap fit");
    auto* figures_cmd = app.add_subcommand("figures", "long-time scenario reproductions");
    auto* envelope_cmd = app.add_subcommand("envelope", "steady-state envelope report");

    // let `fkpplab <subcommand> --config ...` reach the top-level options
    for (auto* sub : {eig, steady, march, sweep_mu_cmd, sweep_alpha_cmd, sweep_joint_cmd, gap_cmd,
                      figures_cmd, envelope_cmd})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        const fkpp::SweepConfig cfg = make_config(config_path, ov);
        if (eig->parsed()) return run_eig(cfg, dump_path);
        if (steady->parsed()) return run_steady(cfg, start);
        if (march->parsed()) return run_march(cfg);
        if (sweep_mu_cmd->parsed()) {
            const auto rep = fkpp::sweep_mu(cfg);
            std::cout << "sweep-mu: " << rep.records.size() << " points, xi(merged)="
                      << fkpp::fmt17(rep.xi_merged)
                      << ", min single-patch xi=" << fkpp::fmt17(rep.min_single_patch) << '\n';
            return 0;
        }
        if (sweep_alpha_cmd->parsed()) {
            const auto rep = fkpp::sweep_alpha(cfg);
            std::cout << "sweep-alpha: value at max alpha=" << fkpp::fmt17(rep.value_at_max_alpha)
                      << ", classical target=" << fkpp::fmt17(rep.classical_target)
                      << ", relative deviation=" << fkpp::fmt17(rep.relative_deviation) << '\n';
            return 0;
        }
        if (sweep_joint_cmd->parsed()) {
            if (xi_star_mid) {
                const auto [lo, hi] = fkpp::joint_range(cfg);
                xi_star = 0.5 * (lo + hi);
            }
            const auto rep = fkpp::sweep_joint(cfg, xi_star);
            std::cout << "sweep-joint: xi_star=" << fkpp::fmt17(rep.xi_star) << " range=["
                      << fkpp::fmt17(rep.range_lo) << "," << fkpp::fmt17(rep.range_hi)
                      << "] final err=" << fkpp::fmt17(rep.steps.back().err) << '\n';
            return 0;
        }
        if (gap_cmd->parsed()) {
            const auto rep = fkpp::gap_exponent(cfg);
            std::cout << "gap-exponent: fit exponent=" << fkpp::fmt17(rep.exponent_fit)
                      << " r2=" << fkpp::fmt17(rep.r2) << " mu0="
                      << (rep.mu_zero ? fkpp::fmt17(*rep.mu_zero) : std::string("absent")) << '\n';
            return 0;
        }
        if (figures_cmd->parsed()) {
            fkpp::reproduce_figures(cfg);
            std::cout << "figures: all checks passed\n";
            return 0;
        }
        if (envelope_cmd->parsed()) {
            const auto rep = fkpp::envelope_scenario(cfg);
            for (const auto& [a, er] : rep.by_alpha)
                std::cout << "envelope alpha=" << a << ": c1=" << fkpp::fmt17(er.fitted_c1)
                          << " C1=" << fkpp::fmt17(er.fitted_C1)
                          << " decay=" << fkpp::fmt17(er.decay_exponent)
                          << " r2=" << fkpp::fmt17(er.decay_r2) << '\n';
            return 0;
        }
        return 3;
    } catch (const fkpp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const fkpp::PreconditionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const fkpp::MonotonicityViolation& e) {
        std::cerr << "assertion failed: " << e.what() << '\n';
        return 2;
    } catch (const fkpp::OutcomeMismatch& e) {
        std::cerr << "outcome mismatch: " << e.what() << '\n';
        return 2;
    } catch (const fkpp::TargetOutOfRange& e) {
        std::cerr << "target out of range: " << e.what() << '\n';
        return 2;
    } catch (const fkpp::OrderViolation& e) {
        std::cerr << "assertion failed: " << e.what() << '\n';
        return 2;
    } catch (const fkpp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
