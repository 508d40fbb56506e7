// homsim: batch driver for mode converter design and two-photon
// interference prediction, scan synthesis, fitting, and witnessing.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric error.

#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "homsim.h"
#include "json.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    bool quiet = false;
    bool no_noise = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_noise_flag) {
    cmd->add_option("-c,--config", args.config_path, "experiment configuration (JSON)")
        ->required();
    cmd->add_option("-o,--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("-s,--seed", args.seed, "random seed (overrides config)");
    cmd->add_flag("-q,--quiet", args.quiet, "suppress the summary on stdout");
    if (with_noise_flag)
        cmd->add_flag("--no-noise", args.no_noise,
                      "synthesize noise-free expectation values");
}

int run(const std::string& command, const CommonArgs& args) {
    nlohmann::ordered_json config;
    {
        std::ifstream in(args.config_path);
        if (!in) {
            std::fprintf(stderr, "error: cannot open config '%s'\n",
                         args.config_path.c_str());
            return HS_ERR_CONFIG;
        }
        try {
            config = nlohmann::ordered_json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            std::fprintf(stderr, "error: malformed JSON in '%s': %s\n",
                         args.config_path.c_str(), e.what());
            return HS_ERR_CONFIG;
        }
    }
    if (!args.out_dir.empty()) config["out"] = args.out_dir;
    if (args.seed >= 0) config["seed"] = static_cast<std::uint64_t>(args.seed);
    if (args.no_noise) {
        if (!config.contains("scan") || !config["scan"].is_object())
            config["scan"] = nlohmann::ordered_json::object();
        config["scan"]["noise"] = false;
    }

    hs_context* ctx = hs_context_create();
    char* summary = nullptr;
    const int rc = hs_run(ctx, command.c_str(), config.dump().c_str(), "", &summary);
    if (rc != HS_OK) {
        std::fprintf(stderr, "error: %s\n", hs_last_error(ctx));
        hs_context_destroy(ctx);
        return rc;
    }
    if (!args.quiet && summary) std::printf("%s\n", summary);
    hs_string_free(summary);
    hs_context_destroy(ctx);
    return HS_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homsim: spatial-mode two-photon interference toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hs_version()));

    CommonArgs args;
    const char* names[] = {"design", "predict", "scan", "fit", "witness", "transfer"};
    const char* descs[] = {
        "design a multi-plane mode converter by wavefront matching",
        "predict two-photon coincidence probabilities",
        "synthesize delay scans and fit them",
        "fit a measured scan CSV",
        "evaluate the three-basis entanglement witness",
        "evaluate transfer metrics for a saved design"};
    for (int i = 0; i < 6; ++i) {
        CLI::App* cmd = app.add_subcommand(names[i], descs[i]);
        add_common(cmd, args, std::string(names[i]) == "scan");
    }

    CLI11_PARSE(app, argc, argv);

    for (const char* name : names)
        if (app.got_subcommand(name)) return run(name, args);
    return HS_ERR_CONFIG;
}
