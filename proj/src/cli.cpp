#include "iabc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "iabc/engine.hpp"
#include "iabc/io.hpp"
#include "iabc/matrix.hpp"
#include "iabc/reduced.hpp"

namespace iabc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;

std::vector<std::vector<int>> candidate_fault_sets(int n, int f) {
    std::vector<std::vector<int>> out{{}};
    for (int k = 1; k <= std::min(f, n); ++k) {
        std::vector<int> idx(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i + 1;
        while (true) {
            out.push_back(idx);
            int i = k - 1;
            while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i + 1) --i;
            if (i < 0) break;
            ++idx[static_cast<size_t>(i)];
            for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
        }
    }
    return out;
}

std::string set_to_string(const std::vector<int>& s) {
    std::string out = "{";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "}";
}

void write_text_file(const fs::path& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << contents;
}

struct ScenarioArtifacts {
    RunSummary summary;
    bool certificate_ok = true;
    bool certified = false;
    std::string failure;
};

// Shared by run and sweep: execute one scenario and persist its artifacts.
ScenarioArtifacts execute_scenario(const ScenarioConfig& config, const fs::path& out_dir,
                                   bool dump_matrices, bool certify, Exec exec) {
    fs::create_directories(out_dir);
    ScenarioResult result = run_scenario(config, exec);

    {
        std::ofstream os(out_dir / "trace.csv", std::ios::binary);
        write_trace_csv(os, result.traces);
    }
    {
        std::ofstream os(out_dir / "plot.csv", std::ios::binary);
        write_plot_csv(os, result.summary);
    }
    write_text_file(out_dir / "summary.json", summary_json(result.summary).dump(2) + "\n");

    ScenarioArtifacts art;
    art.summary = result.summary;

    if (dump_matrices) {
        const double b = beta(config.graph, config.faults.f);
        std::vector<TransitionMatrix> matrices;
        matrices.reserve(result.traces.size());
        for (const auto& tr : result.traces)
            matrices.push_back(build_transition_matrix(tr, config.faults, b));
        std::ofstream os(out_dir / "matrices.jsonl", std::ios::binary);
        write_matrices_jsonl(os, matrices);
    }
    if (certify) {
        art.certified = true;
        const ConvergenceReport report =
            convergence_certificate(result.traces, config.graph, config.faults, config.epsilon, exec);
        art.certificate_ok = report.ok;
        if (!report.ok) art.failure = report.first_failure;
        write_text_file(out_dir / "certificate.json", certificate_json(report).dump(2) + "\n");
    }
    if (!art.summary.converged && art.failure.empty()) art.failure = "did not converge";
    if (!art.summary.validity_ok && art.failure.empty()) art.failure = "validity violated";
    return art;
}

bool scenario_passed(const ScenarioArtifacts& art) {
    return art.summary.converged && art.summary.validity_ok && art.certificate_ok;
}

} // namespace

int cmd_check(const CheckOptions& opt) {
    try {
        const DirectedGraph g = load_graph(opt.graph_path);
        const auto degree = check_degree_condition(g, opt.f);
        if (degree.ok) {
            std::cout << "degree condition: ok\n";
        } else {
            std::cout << "degree condition: FAIL at nodes " << set_to_string(degree.violating) << "\n";
        }

        for (const auto& faulty : candidate_fault_sets(g.n(), opt.f)) {
            FaultConfig fc(opt.f, faulty);
            std::cout << "F=" << set_to_string(faulty) << " tau=" << reduced_graph_count(g, fc) << "\n";
        }

        set_threads(opt.parallel);
        const auto suff = check_sufficiency_condition(g, opt.f, SufficiencyMethod::Auto,
                                                      opt.parallel > 0 ? Exec::Parallel : Exec::Serial);
        if (suff.ok && degree.ok) {
            std::cout << "sufficiency: PASS (every reduced graph has a root)\n";
            return kExitOk;
        }
        if (!suff.ok) {
            const auto& w = *suff.witness;
            std::cout << "sufficiency: FAIL\n";
            std::cout << "witness F=" << set_to_string(w.faulty) << " rootless reduced graph:\n";
            for (size_t p = 0; p < w.h.nodes.size(); ++p)
                std::cout << "  node " << w.h.nodes[p] << " keeps in-edges from "
                          << set_to_string(w.h.kept_in[p]) << "\n";
        }
        return kExitVerification;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    }
}

int cmd_run(const RunOptions& opt) {
    try {
        ScenarioFile file = load_scenario(opt.config_path);
        if (opt.have_seed) {
            file.config.seed = opt.seed;
            file.config.adversary.seed.reset();
        }
        fs::path out_dir = !opt.out_dir.empty() ? fs::path(opt.out_dir)
                           : !file.out_dir.empty()
                               ? fs::path(file.out_dir)
                               : fs::path("iabc_out") / fs::path(opt.config_path).stem();

        set_threads(opt.parallel);
        const Exec exec = opt.parallel > 0 ? Exec::Parallel : Exec::Serial;
        const ScenarioArtifacts art =
            execute_scenario(file.config, out_dir, opt.dump_matrices, opt.certify, exec);

        std::cout << "rounds=" << art.summary.rounds << " final_spread=" << fmt_double(art.summary.final_spread)
                  << " converged=" << (art.summary.converged ? "yes" : "no")
                  << " validity=" << (art.summary.validity_ok ? "ok" : "VIOLATED");
        if (art.certified) std::cout << " certificate=" << (art.certificate_ok ? "ok" : "FAILED");
        std::cout << "\n";
        if (!scenario_passed(art)) {
            std::cerr << "failure: " << art.failure << "\n";
            return kExitVerification;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    }
}

int cmd_sweep(const SweepOptions& opt) {
    try {
        std::vector<fs::path> configs;
        if (!fs::is_directory(opt.config_dir))
            throw ConfigError(opt.config_dir + " is not a directory");
        for (const auto& entry : fs::directory_iterator(opt.config_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                configs.push_back(entry.path());
        std::sort(configs.begin(), configs.end());
        if (configs.empty()) throw ConfigError("no .json scenario configs in " + opt.config_dir);

        const fs::path out_root = opt.out_dir.empty() ? fs::path("iabc_out") : fs::path(opt.out_dir);
        fs::create_directories(out_root);

        struct Entry {
            std::string name;
            bool input_error = false;
            bool passed = false;
            std::string failure;
            RunSummary summary;
            bool certified = false, certificate_ok = false;
        };
        std::vector<Entry> entries(configs.size());

        set_threads(opt.parallel);
        const int count = static_cast<int>(configs.size());
        auto one = [&](int c) {
            Entry& entry = entries[static_cast<size_t>(c)];
            entry.name = configs[static_cast<size_t>(c)].filename().string();
            try {
                ScenarioFile file = load_scenario(configs[static_cast<size_t>(c)].string());
                if (opt.have_seed) {
                    file.config.seed = opt.seed;
                    file.config.adversary.seed.reset();
                }
                const fs::path out_dir = out_root / configs[static_cast<size_t>(c)].stem();
                const ScenarioArtifacts art = execute_scenario(file.config, out_dir, opt.dump_matrices,
                                                               opt.certify, Exec::Serial);
                entry.summary = art.summary;
                entry.certified = art.certified;
                entry.certificate_ok = art.certificate_ok;
                entry.passed = scenario_passed(art);
                entry.failure = art.failure;
            } catch (const ConfigError& e) {
                entry.input_error = true;
                entry.failure = e.what();
            } catch (const std::exception& e) {
                entry.failure = e.what();
            }
        };
        if (opt.parallel > 0) {
#pragma omp parallel for schedule(dynamic)
            for (int c = 0; c < count; ++c) one(c);
        } else {
            for (int c = 0; c < count; ++c) one(c);
        }

        json report;
        json scenarios = json::array();
        int passed = 0;
        for (const auto& entry : entries) {
            json js;
            js["config"] = entry.name;
            js["passed"] = entry.passed;
            if (entry.input_error) js["input_error"] = true;
            if (!entry.failure.empty()) js["failure"] = entry.failure;
            if (!entry.input_error) {
                js["rounds"] = entry.summary.rounds;
                js["final_spread"] = entry.summary.final_spread;
                js["converged"] = entry.summary.converged;
                js["validity_ok"] = entry.summary.validity_ok;
                if (entry.certified) js["certificate_ok"] = entry.certificate_ok;
            }
            passed += entry.passed ? 1 : 0;
            scenarios.push_back(std::move(js));
        }
        report["scenarios"] = std::move(scenarios);
        report["total"] = count;
        report["passed"] = passed;
        report["failed"] = count - passed;
        write_text_file(out_root / "report.json", report.dump(2) + "\n");

        for (const auto& entry : entries)
            std::cout << (entry.passed ? "PASS " : "FAIL ") << entry.name
                      << (entry.failure.empty() ? "" : "  (" + entry.failure + ")") << "\n";
        std::cout << passed << "/" << count << " scenarios passed\n";
        return passed == count ? kExitOk : kExitVerification;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    }
}

} // namespace iabc
