#pragma once

#include <string>

namespace iabc {

// Exit codes: 0 success, 1 verification/convergence failure, 2 input error.

struct CheckOptions {
    std::string graph_path;
    int f = 0;
    int parallel = 0; // threads for the sufficiency scan; 0 = serial
};

struct RunOptions {
    std::string config_path;
    std::string out_dir;      // overrides the config's out_dir; default "iabc_out"
    bool dump_matrices = false;
    bool certify = false;
    bool have_seed = false;
    uint64_t seed = 0;        // overrides the config seed when have_seed
    int parallel = 0;         // per-round node parallelism; must not change outputs
};

struct SweepOptions {
    std::string config_dir;
    std::string out_dir;
    bool dump_matrices = false;
    bool certify = false;
    bool have_seed = false;
    uint64_t seed = 0;
    int parallel = 0;         // scenarios run concurrently
};

int cmd_check(const CheckOptions& opt);
int cmd_run(const RunOptions& opt);
int cmd_sweep(const SweepOptions& opt);

} // namespace iabc
