// Command-line front end: compute connecting lightlike rays for a scenario,
// validate scenario files, and describe the chart catalog.

#include "fermat/scenario.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

namespace {

int run_command(const std::string& path, const std::string& out_dir,
                bool check_convexity, int hessian_modes, long long seed,
                bool past) {
    fermat::Scenario sc = fermat::load_scenario(path);
    if (check_convexity)
        sc.check_convexity = true;
    if (hessian_modes > 0)
        sc.hessian_modes = hessian_modes;
    if (seed >= 0)
        sc.seed = static_cast<std::uint64_t>(seed);
    if (past)
        sc.past = true;

    const fermat::RunReport report = fermat::run(sc);
    fermat::emit_outputs(report, out_dir);

    std::cout << "rays: " << report.rays.size() << "\n";
    for (const fermat::RayResult& ray : report.rays) {
        std::printf("  ray %d: arrival %.12g, index %d%s (via %s)\n", ray.id, ray.tau,
                    ray.index, ray.nondegenerate ? "" : ", degenerate",
                    ray.start_hint.c_str());
    }
    std::cout << "relations: " << (report.relations.consistent ? "consistent" : "VIOLATED")
              << "\nparity: " << report.parity.message << "\n";
    for (const std::string& note : report.notes)
        std::cout << "note: " << note << "\n";
    std::cout << "outputs written to " << out_dir << "\n";

    if (report.guard_abort)
        return 2;
    if (report.ledger_violated)
        return 3;
    return 0;
}

int validate_command(const std::string& path) {
    const fermat::Scenario sc = fermat::load_scenario(path);
    const fermat::SplittingChart chart = fermat::build_chart(sc);
    fermat::Event p = sc.p;
    fermat::ObserverCurve obs = sc.observer;
    if (sc.past) {
        p.t = -sc.p.t;
        obs.t_min = -sc.observer.t_max;
        obs.t_max = -sc.observer.t_min;
    }
    fermat::validate_problem(chart, p, obs, fermat::build_region(sc, chart));
    std::cout << "scenario ok\n";
    std::cout << "canonical form: " << fermat::canonical_dump(sc) << "\n";
    std::printf("hash: %016llx\n",
                static_cast<unsigned long long>(fermat::scenario_hash(sc)));
    return 0;
}

int catalog_command(const std::string& name) {
    if (name.empty()) {
        for (const std::string& n : fermat::catalog_names())
            std::cout << n << "\n";
        return 0;
    }
    const fermat::SplittingChart chart = fermat::catalog(name);
    std::cout << name << ": spacetime dimension " << chart.dim << "\n";
    if (name == "minkowski")
        std::cout << "  flat space; parameters: dim\n";
    else if (name == "static_spherical")
        std::cout << "  spherically symmetric optical profile around a central mass;\n"
                     "  parameters: dim, mass (chart domain r > mass/2)\n";
    else if (name == "conformally_stationary_demo")
        std::cout << "  flat slices with a constant cross term; parameters: dim, delta1..\n";
    else if (name == "product_sphere")
        std::cout << "  round sphere times the time axis; parameters: radius\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lightlike connecting rays via arrival-time shortening"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", catalog_name;
    bool check_convexity = false, past = false;
    int hessian_modes = 0;
    long long seed = -1;

    CLI::App* cmd_run = app.add_subcommand("run", "solve a scenario and write reports");
    cmd_run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    cmd_run->add_option("--out", out_dir, "output directory (default: out)");
    cmd_run->add_flag("--check-convexity", check_convexity,
                      "probe the region for light convexity");
    cmd_run->add_option("--hessian-crosscheck", hessian_modes,
                        "cross-check ray indices with an arrival-time Hessian of this many modes");
    cmd_run->add_option("--seed", seed, "override the scenario RNG seed");
    cmd_run->add_flag("--past", past, "search past-pointing rays instead of future-pointing");

    CLI::App* cmd_validate = app.add_subcommand("validate", "check a scenario file");
    cmd_validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    CLI::App* cmd_catalog = app.add_subcommand("catalog", "list built-in charts");
    cmd_catalog->add_option("name", catalog_name, "chart to describe");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed())
            return run_command(scenario_path, out_dir, check_convexity, hessian_modes, seed, past);
        if (cmd_validate->parsed())
            return validate_command(scenario_path);
        return catalog_command(catalog_name);
    } catch (const fermat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
