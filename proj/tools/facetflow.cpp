// facetflow CLI: thin front end over the shared C API.

#include <facetflow/facetflow.h>

#include <CLI11.hpp>

#include <cstdint>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"facetflow: very singular elliptic system workbench"};
    app.require_subcommand(1);

    std::string config = "config.json";
    std::string out;
    std::string run_dir;
    std::int64_t seed = -1;
    bool deterministic = false;

    auto add_common = [&](CLI::App* cmd, bool wants_config) {
        if (wants_config) cmd->add_option("--config", config, "JSON config path");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("--deterministic", deterministic, "force deterministic mode");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the inequality sweep suites");
    add_common(verify, true);
    CLI::App* solve = app.add_subcommand("solve", "minimize the relaxed functional once");
    add_common(solve, true);
    CLI::App* ladder = app.add_subcommand("ladder", "run the epsilon approximation ladder");
    add_common(ladder, true);
    CLI::App* regularity =
        app.add_subcommand("regularity", "compute regularity diagnostics on a run directory");
    regularity->add_option("run_dir", run_dir, "prior solve/ladder run directory")->required();
    regularity->add_option("--seed", seed, "override the config seed");
    regularity->add_flag("--deterministic", deterministic, "force deterministic mode");

    CLI11_PARSE(app, argc, argv);

    const char* out_ptr = out.empty() ? nullptr : out.c_str();
    const int det = deterministic ? 1 : -1;

    int code = 0;
    if (verify->parsed())
        code = ff_cmd_verify(config.c_str(), out_ptr, seed, det);
    else if (solve->parsed())
        code = ff_cmd_solve(config.c_str(), out_ptr, seed, det);
    else if (ladder->parsed())
        code = ff_cmd_ladder(config.c_str(), out_ptr, seed, det);
    else if (regularity->parsed())
        code = ff_cmd_regularity(run_dir.c_str(), seed, det);

    if (code != 0 && ff_last_error()[0] != '\0')
        std::fprintf(stderr, "facetflow: %s\n", ff_last_error());
    return code;
}
