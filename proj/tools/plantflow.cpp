#include "plantflow/config.hpp"
#include "plantflow/errors.hpp"
#include "plantflow/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

using namespace plantflow;

namespace {

struct Options {
    std::string config;
    std::string stages = "all";
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> mesh_h;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "JSON run configuration (defaults when omitted)");
    cmd->add_option("--out", o.out, "output directory (overrides outputs.dir)");
    cmd->add_option("--seed", o.seed, "seed recorded with the artifacts");
    cmd->add_option("--mesh-h", o.mesh_h, "unit-cell mesh size (overrides solver.cell_h)");
}

int run(const Options& o, const std::vector<Stage>& stages) {
    RunConfig config;
    try {
        config = o.config.empty() ? default_config() : load_config(o.config);
        if (!o.out.empty()) config.outputs.dir = o.out;
        if (o.seed) config.seed = *o.seed;
        if (o.mesh_h) config.cell_h = *o.mesh_h;
        validate_config(config);
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return e.kind() == std::string("IOError") ? kExitSolve : kExitConfig;
    }
    const PipelineSummary s = run_pipeline(config, stages, &std::cout);
    if (s.exit_code != kExitOk)
        std::cerr << "stage " << s.failed_stage << " failed (" << s.error_kind << "): " << s.error_message << '\n';
    return s.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homogenized water and solute transport in plant tissue"};
    app.require_subcommand(1);
    Options o;
    const std::pair<const char*, Stage> single[] = {
        {"cell", Stage::Cell}, {"tensors", Stage::Tensors}, {"macro", Stage::Macro}, {"verify", Stage::Verify}};
    const char* help[] = {"solve the unit-cell flow problems", "write the effective tensors K, M, A_a, A_s",
                          "run the macroscopic model from written tensors",
                          "micro-to-macro convergence study from written tensors"};
    std::vector<std::pair<CLI::App*, Stage>> commands;
    for (int k = 0; k < 4; ++k) {
        CLI::App* cmd = app.add_subcommand(single[k].first, help[k]);
        add_common(cmd, o);
        commands.emplace_back(cmd, single[k].second);
    }
    CLI::App* pipeline = app.add_subcommand("pipeline", "run several stages in order");
    add_common(pipeline, o);
    pipeline->add_option("--stages", o.stages, "comma-separated subset of cell,tensors,macro,verify or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (pipeline->parsed()) {
        std::vector<Stage> stages;
        try {
            stages = parse_stages(o.stages);
        } catch (const Error& e) {
            std::cerr << e.kind() << ": " << e.what() << '\n';
            return kExitConfig;
        }
        return run(o, stages);
    }
    for (const auto& [cmd, stage] : commands)
        if (cmd->parsed()) return run(o, {stage});
    return kExitConfig;
}
