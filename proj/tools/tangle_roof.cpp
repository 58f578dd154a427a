// tangle-roof: command-line front end over the header library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef TANGLE_ROOF_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "tangle_roof/tangle_roof.hpp"
#include "tangle_roof/verify.hpp"

namespace tr = tangle_roof;
using tr::json;

namespace {

struct Globals {
    double tol = 1e-6;
    std::uint64_t seed = 0;
    int phi_grid = 721;
    int p_grid = 501;
    int restarts = 400;
    double rank_tol = 1e-10;

    tr::RoofOptions roof() const {
        tr::RoofOptions o;
        o.exact_tol = tol;
        o.phi_grid = phi_grid;
        o.p_grid = p_grid;
        return o;
    }
    tr::OracleOptions oracle() const {
        tr::OracleOptions o;
        o.restarts = restarts;
        o.seed = seed;
        return o;
    }
};

// Where a state comes from: a catalog name or a JSON term file.
struct StateArgs {
    std::string name;
    std::string file;
    std::vector<double> p;
    double eta = 0.0;

    void add(CLI::App* cmd, bool name_positional = false) {
        if (name_positional)
            cmd->add_option("name", name, "catalog state name");
        else
            cmd->add_option("--state,-s", name, "catalog state name");
        cmd->add_option("--file,-f", file, "JSON term list")->check(CLI::ExistingFile);
        cmd->add_option("--p", p, "weights |c_i|^2 in written order")->delimiter(',');
        cmd->add_option("--eta", eta, "phase on the family's eta slot");
    }

    tr::TermList terms() const {
        if (!file.empty()) {
            if (!name.empty()) throw CLI::ValidationError("give either --state or --file, not both");
            std::ifstream in(file);
            std::stringstream ss;
            ss << in.rdbuf();
            return tr::load_state(std::string_view(ss.str())).terms;
        }
        if (name.empty()) throw CLI::RequiredError("--state or --file");
        tr::CatalogParams params;
        if (!p.empty()) params.p = p;
        params.eta = eta;
        return tr::build(name, params).terms;
    }

    tr::PureState state() const { return terms().to_state().normalized(); }
};

// Source for rank-2 commands: a pure state with a traced site, or a density matrix file.
struct RangeArgs {
    StateArgs src;
    int trace = 0;
    std::string density;

    void add(CLI::App* cmd) {
        src.add(cmd);
        cmd->add_option("--trace,-t", trace, "site traced out (1-based)");
        cmd->add_option("--density", density, "3-qubit density matrix JSON")->check(CLI::ExistingFile);
    }

    tr::DensityMatrix rho() const {
        if (!density.empty()) {
            std::ifstream in(density);
            return tr::density_from_json(json::parse(in));
        }
        if (trace == 0) throw CLI::RequiredError("--trace");
        return tr::partial_trace(src.state(), trace);
    }

    tr::RankTwoRange range(const Globals& g) const { return tr::rank2_range(rho(), g.rank_tol); }
};

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex roofs of sqrt(threetangle) for rank-2 three-qubit states"};
    app.name("tangle-roof");
    app.require_subcommand(1);

    Globals g;
    app.add_option("--tol", g.tol, "exactness tolerance on the roof bound gap")->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--phi-grid", g.phi_grid, "phase grid size")->capture_default_str()->check(CLI::Range(3, 1 << 20));
    app.add_option("--p-grid", g.p_grid, "Bloch z grid size")->capture_default_str()->check(CLI::Range(3, 1 << 20));
    app.add_option("--restarts", g.restarts, "oracle restarts")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--rank-tol", g.rank_tol, "eigenvalue cutoff for rank")->capture_default_str();
    for (auto* o : app.get_options()) o->configurable(false);
    app.fallthrough();

    // state
    auto* state = app.add_subcommand("state", "catalog states");
    state->require_subcommand(1);
    auto* state_list = state->add_subcommand("list", "list catalog names");
    auto* state_show = state->add_subcommand("show", "print a state's terms as JSON");
    StateArgs show_args;
    show_args.add(state_show, true);

    // invariants
    auto* inv = app.add_subcommand("invariants", "concurrences, threetangles, SL generators");
    StateArgs inv_args;
    inv_args.add(inv);
    bool inv_roofs = false;
    inv->add_flag("--roofs", inv_roofs, "fill triples with convex roofs and add the monogamy report (4 qubits)");

    // reduce
    auto* red = app.add_subcommand("reduce", "reduced density matrix");
    StateArgs red_args;
    red_args.add(red);
    std::vector<int> keep;
    red->add_option("--keep,-k", keep, "sites kept (1-based)")->delimiter(',')->required();

    // balance
    auto* bal = app.add_subcommand("balance", "c-/a-balancedness of the support");
    StateArgs bal_args;
    bal_args.add(bal);

    // flip
    auto* flp = app.add_subcommand("flip", "partial spin flip of written components");
    StateArgs flip_args;
    flip_args.add(flp);
    std::vector<int> components;
    flp->add_option("--components,-c", components, "components to flip (1-based)")->delimiter(',')->required();

    // curves
    auto* crv = app.add_subcommand("curves", "characteristic curves as CSV");
    RangeArgs crv_args;
    crv_args.add(crv);
    std::vector<double> phis;
    int phi_count = 0;
    std::string out_path, series_path;
    int series_points = 101;
    auto* phi_opt = crv->add_option("--phi", phis, "phase values")->delimiter(',');
    auto* count_opt = crv->add_option("--phi-count", phi_count, "uniform phases on [0, 2pi)")->check(CLI::PositiveNumber);
    phi_opt->excludes(count_opt);
    crv->add_option("--out,-o", out_path, "CSV path (stdout if absent)");
    crv->add_option("--series-out", series_path, "CSV of p,min_curve,envelope,roof_lower,roof_upper");
    crv->add_option("--series-points", series_points, "points in the series")->check(CLI::Range(2, 1 << 20));

    // zeropolytope
    auto* zp = app.add_subcommand("zeropolytope", "zeros of tau3 on the range");
    RangeArgs zp_args;
    zp_args.add(zp);

    // roof
    auto* rf = app.add_subcommand("roof", "convex roof of sqrt(tau3)");
    RangeArgs rf_args;
    rf_args.add(rf);
    double axis = -1.0;
    rf->add_option("--axis", axis, "evaluate on the family at this axis point instead of the state itself")
        ->check(CLI::Range(0.0, 1.0));

    // oracle
    auto* orc = app.add_subcommand("oracle", "brute-force upper estimate of the roof");
    RangeArgs orc_args;
    orc_args.add(orc);
    int max_parts = 4;
    orc->add_option("--max-parts", max_parts, "decomposition length")->check(CLI::Range(1, 16));

    // verify
    auto* ver = app.add_subcommand("verify", "run the acceptance checks");
    bool no_oracle = false;
    ver->add_flag("--no-oracle", no_oracle, "skip the brute-force comparisons");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*state_list) {
            for (const auto& n : tr::catalog_names()) std::cout << n << '\t' << tr::catalog_summary(n) << '\n';
        } else if (*state_show) {
            print_json(tr::to_json(show_args.terms()));
        } else if (*inv) {
            const auto psi = inv_args.state();
            if (inv_roofs) {
                if (psi.n_qubits() != 4) throw tr::ShapeError("--roofs needs a 4-qubit state");
                std::map<tr::SiteTriple, double> roofs;
                for (int t = 4; t >= 1; --t) {
                    const auto k = tr::detail::all_sites_but(t, 4);
                    roofs[{k[0], k[1], k[2]}] =
                        tr::convex_roof_rank2(tr::rank2_range(tr::partial_trace(psi, t), g.rank_tol), g.roof())
                            .upper_bound;
                }
                json j = tr::to_json(tr::invariant_report(psi, &roofs));
                j["monogamy"] = tr::to_json(tr::monogamy_report(psi, roofs));
                print_json(j);
            } else {
                print_json(tr::to_json(tr::invariant_report(psi)));
            }
        } else if (*red) {
            print_json(tr::to_json(tr::reduce(red_args.state(), keep)));
        } else if (*bal) {
            print_json(tr::to_json(tr::classify_balance(tr::SupportPattern::from_terms(bal_args.terms()))));
        } else if (*flp) {
            const std::set<int> c(components.begin(), components.end());
            print_json(tr::to_json(tr::partial_spin_flip(flip_args.terms(), c)));
        } else if (*crv) {
            if (phi_opt->count() > 0 && phis.empty()) throw CLI::ValidationError("--phi", "empty phase list");
            if (phis.empty()) {
                const int n = phi_count > 0 ? phi_count : 3;
                if (phi_count > 0)
                    for (int i = 0; i < n; ++i) phis.push_back(2.0 * tr::kPi * i / n);
                else
                    phis = {0.0, tr::kPi / 2, tr::kPi};
            }
            const auto range = crv_args.range(g);
            std::ostringstream csv;
            csv << "phi,p,sqrt_tau3\n";
            for (double phi : phis) {
                const auto c = tr::characteristic_curve(range, phi, g.p_grid);
                for (const auto& [p, v] : c.samples) csv << fmt12(phi) << ',' << fmt12(p) << ',' << fmt12(v) << '\n';
            }
            if (out_path.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream f(out_path, std::ios::binary);
                if (!f) throw tr::Error("cannot write " + out_path);
                f << csv.str();
            }
            if (!series_path.empty()) {
                const tr::Rank2Roof roof(range, g.roof());
                std::ofstream f(series_path, std::ios::binary);
                if (!f) throw tr::Error("cannot write " + series_path);
                f << "p,min_curve,envelope,roof_lower,roof_upper\n";
                for (int i = 0; i < series_points; ++i) {
                    const double p = static_cast<double>(i) / (series_points - 1);
                    const auto r = roof.at(p);
                    f << fmt12(p) << ',' << fmt12(roof.min_curve(p)) << ',' << fmt12(roof.envelope(p)) << ','
                      << fmt12(r.lower_bound) << ',' << fmt12(r.upper_bound) << '\n';
                }
            }
        } else if (*zp) {
            print_json(tr::to_json(tr::zero_polytope(zp_args.range(g))));
        } else if (*rf) {
            const auto range = rf_args.range(g);
            json j = tr::to_json(axis >= 0.0 ? tr::Rank2Roof(range, g.roof()).at(axis)
                                             : tr::convex_roof_rank2(range, g.roof()));
            j["mixing_angles"] = range.angles ? json{{"alpha", range.angles->alpha}, {"chi", range.angles->chi}}
                                              : json(nullptr);
            print_json(j);
        } else if (*orc) {
            auto o = g.oracle();
            o.max_parts = max_parts;
            const auto range = orc_args.range(g);
            print_json({{"value", tr::brute_force_roof(range, o)},
                        {"max_parts", o.max_parts},
                        {"restarts", o.restarts},
                        {"seed", o.seed}});
        } else if (*ver) {
            tr::VerifyOptions vo;
            vo.roof = g.roof();
            vo.oracle = g.oracle();
            vo.seed = g.seed;
            vo.run_oracle = !no_oracle;
            const auto rep = tr::run_verify(vo);
            print_json(tr::to_json(rep));
            return rep.failed() == 0 ? 0 : 1;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "tangle-roof: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tangle-roof: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
