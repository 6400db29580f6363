// SPDX-License-Identifier: Apache-2.0
//
// simcovert: SIM-assisted near-field covert downlink simulation and optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
// simcovert: single runs, parameter sweeps and the acceptance suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "simcovert/harness.hpp"
#include "simcovert/io.hpp"

namespace fs = std::filesystem;
using namespace simcovert;

namespace
{

std::vector<std::string> split_list(const std::string &text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

// "1-20", "3,5,9" or a mix such as "1-5,10".
std::vector<std::int64_t> parse_seeds(const std::string &text)
{
    std::vector<std::int64_t> seeds;
    for (const std::string &part : split_list(text))
    {
        const auto dash = part.find('-', 1);
        if (dash == std::string::npos)
        {
            seeds.push_back(std::stoll(part));
            continue;
        }
        const std::int64_t lo = std::stoll(part.substr(0, dash)), hi = std::stoll(part.substr(dash + 1));
        if (hi < lo)
            throw std::invalid_argument("seed range '" + part + "' is empty");
        for (std::int64_t s = lo; s <= hi; ++s)
            seeds.push_back(s);
    }
    return seeds;
}

SystemConfig resolve_config(const std::string &profile, const std::string &config_path)
{
    SystemConfig cfg = profile_by_name(profile);
    if (!config_path.empty())
        cfg = load_config(config_path, cfg);
    validate_config(cfg);
    return cfg;
}

int run_command(const std::string &profile, const std::string &config_path, const std::string &algo_name,
                std::int64_t seed, const fs::path &out)
{
    const SystemConfig cfg = resolve_config(profile, config_path);
    const Algorithm algo = algorithm_from_string(algo_name);
    const Scenario sc = build_scenario(cfg, seed);
    const SolveRecord rec = run_algorithm(algo, sc);

    std::printf("%s seed %lld: sum_rate %.6f bps/Hz, feasible %s, iterations %d, %.3f s%s%s\n", to_string(algo),
                static_cast<long long>(seed), rec.report.sum_rate, rec.feasible ? "yes" : "no", rec.iterations,
                rec.seconds, rec.message.empty() ? "" : ", ", rec.message.c_str());

    if (!out.empty())
    {
        fs::create_directories(out);
        write_text_file(out / "config.txt", serialize_config(cfg));
        write_text_file(out / "record.json", record_to_json(rec) + "\n");
        write_text_file(out / "trace.csv", trace_csv(rec));
        write_text_file(out / "report.csv",
                        link_report_csv_header(cfg.num_users, cfg.num_wardens) + "\n" + link_report_csv_row(rec.report) +
                            "\n");
        write_dump_file(out / "channels.bin", make_dump(cfg, sc.stack, sc.channels, &rec));
        if (rec.phases.num_layers() == sc.stack.num_layers() && rec.beamformers.size() > 0)
        {
            const CMatrix<double> g = sim_response(sc.stack, rec.phases);
            const LoweredProgram lp =
                lower_beamfocusing(surrogate_state(sc.channels, g, rec.beamformers, cfg), sc.channels, g, cfg);
            write_text_file(out / "program.txt", lp.program.dump());
        }
    }
    return rec.failed ? 2 : 0;
}

int sweep_command(const std::string &profile, const std::string &config_path, const std::string &algos,
                  const std::string &seeds, const std::string &param, const std::string &values, const fs::path &out,
                  int workers)
{
    SweepSpec spec;
    spec.base = resolve_config(profile, config_path);
    spec.param = param;
    spec.values = split_list(values);
    for (const std::string &a : split_list(algos))
        spec.algorithms.push_back(algorithm_from_string(a));
    spec.seeds = parse_seeds(seeds);
    spec.out_dir = out;
    spec.workers = workers;

    const SweepResult result = run_sweep(spec, [](const SweepRow &r, std::size_t done, std::size_t total) {
        std::fprintf(stderr, "[%zu/%zu] %s %s seed %lld: %.4f%s\n", done, total, r.value.c_str(),
                     to_string(r.algorithm), static_cast<long long>(r.seed), r.sum_rate,
                     r.failed ? " (failed)" : r.feasible ? "" : " (infeasible)");
    });
    if (out.empty())
        std::cout << sweep_csv(result);
    else
        write_sweep_outputs(spec, result);

    for (const Aggregate &a : aggregate(result))
        std::fprintf(stderr, "%s = %s  %-8s mean %.4f  std %.4f  n %d\n", param.c_str(), a.value.c_str(),
                     to_string(a.algorithm), a.mean, a.std, a.n);
    for (const SweepRow &r : result.rows)
        if (r.failed)
            return 2;
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Covert SIM beamforming: runs, sweeps and acceptance checks"};
    app.require_subcommand(1);

    std::string profile = "desk", config_path, algo = "sca", seeds = "1-20", param, values;
    std::int64_t seed = 1;
    std::string out;
    int workers = 0;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--profile", profile, "Base profile")->check(CLI::IsMember({"desk", "paper"}));
        sub->add_option("--config", config_path, "key = value file applied on top of the profile")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory");
    };

    CLI::App *run = app.add_subcommand("run", "Solve one scenario");
    add_common(run);
    run->add_option("--algo", algo, "sca | pga | random | codebook")
        ->check(CLI::IsMember({"sca", "pga", "random", "codebook"}));
    run->add_option("--seed", seed, "Scenario seed");

    CLI::App *sweep = app.add_subcommand("sweep", "Sweep one configuration field over seeds");
    add_common(sweep);
    sweep->add_option("--algo", algo, "Comma-separated algorithms");
    sweep->add_option("--seeds", seeds, "Seed list, e.g. 1-20 or 1,4,9");
    sweep->add_option("--param", param, "Configuration field to sweep")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--workers", workers, "Worker threads, 0 = hardware");

    CLI::App *check = app.add_subcommand("check", "Run the acceptance suite");
    acceptance::Options acc;
    check->add_option("--only", acc.only, "Criterion ids")->delimiter(',');
    check->add_option("--workers", acc.workers, "Sweep worker threads, 0 = hardware");
    check->add_flag("-v,--verbose", acc.verbose, "Per-instance detail");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
            return run_command(profile, config_path, algo, seed, out);
        if (*sweep)
            return sweep_command(profile, config_path, algo, seeds, param, values, out, workers);
        if (*check)
            return acceptance::run_all(acc, std::cout) ? 0 : 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
