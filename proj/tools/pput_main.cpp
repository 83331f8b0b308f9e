#include "pput/commands.hpp"
#include "pput/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Staircase-strike American put under Poisson exercise windows"};
    app.set_version_flag("--version", std::string(pput::tool_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string lambda_list;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const char* names[] = {"solve", "boundary", "simulate", "verify", "sweep"};
    const char* descs[] = {
        "solve the value-surface chain and export it",
        "solve, then export per-level exercise boundaries",
        "solve, then run the stopping simulation ensemble",
        "run the oracle battery and write a pass/fail report",
        "solve once per lambda and export the comparison tables",
    };
    for (int i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "path to the run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        auto* s = sub->add_option("--seed", seed, "simulation seed (overrides [sim] seed)");
        sub->add_option("--lambda", lambda_list,
                        "comma-separated sweep lambdas (overrides [sweep] lambda)");
        sub->callback([s, &seed_set]() { seed_set = s->count() > 0; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        pput::RunConfig cfg = pput::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed_set) cfg.sim.seed = seed;
        if (!lambda_list.empty()) {
            cfg.sweep_lambdas.clear();
            std::string item;
            std::istringstream is(lambda_list);
            while (std::getline(is, item, ','))
                cfg.sweep_lambdas.push_back(std::stod(item));
        }

        const std::string cmd = app.get_subcommands().front()->get_name();
        int rc = 0;
        if (cmd == "solve") rc = pput::cmd_solve(cfg);
        else if (cmd == "boundary") rc = pput::cmd_boundary(cfg);
        else if (cmd == "simulate") rc = pput::cmd_simulate(cfg);
        else if (cmd == "verify") rc = pput::cmd_verify(cfg);
        else if (cmd == "sweep") rc = pput::cmd_sweep(cfg);
        if (rc != 0)
            std::cerr << cmd << ": " << rc << " check(s) failed\n";
        return rc == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
