#include "CLI11.hpp"

#include "iabc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"iterative approximate Byzantine consensus: simulate, check, certify"};
    app.require_subcommand(1);

    iabc::CheckOptions check;
    auto* c = app.add_subcommand("check", "degree + sufficiency conditions for a graph file");
    c->add_option("graph", check.graph_path, "graph JSON file")->required();
    c->add_option("-f,--faults", check.f, "fault bound f")->required();
    c->add_option("--parallel", check.parallel, "threads for the candidate-F scan");

    iabc::RunOptions run;
    auto* r = app.add_subcommand("run", "execute one scenario config");
    r->add_option("config", run.config_path, "scenario JSON file")->required();
    r->add_option("--out", run.out_dir, "output directory");
    r->add_flag("--dump-matrices", run.dump_matrices, "write per-round reconstructed matrices");
    r->add_flag("--certify", run.certify, "run the convergence certificate");
    auto* rseed = r->add_option("--seed", run.seed, "override the scenario seed");
    r->add_option("--parallel", run.parallel, "per-round node parallelism (does not change outputs)");

    iabc::SweepOptions sweep;
    auto* s = app.add_subcommand("sweep", "run every scenario config in a directory");
    s->add_option("dir", sweep.config_dir, "directory of scenario JSON files")->required();
    s->add_option("--out", sweep.out_dir, "output directory");
    s->add_flag("--dump-matrices", sweep.dump_matrices, "write per-round reconstructed matrices");
    s->add_flag("--certify", sweep.certify, "run the convergence certificate per scenario");
    auto* sseed = s->add_option("--seed", sweep.seed, "override every scenario seed");
    s->add_option("--parallel", sweep.parallel, "scenarios run concurrently");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    run.have_seed = rseed->count() > 0;
    sweep.have_seed = sseed->count() > 0;

    if (c->parsed()) return iabc::cmd_check(check);
    if (r->parsed()) return iabc::cmd_run(run);
    return iabc::cmd_sweep(sweep);
}
