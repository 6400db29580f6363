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
#include "simcovert/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "simcovert/io.hpp"

namespace simcovert
{

namespace
{

const std::string kSweepHeader = "param,algo,seed,sum_rate,feasible,iters,seconds";

double value_to_x(const std::string &value, std::size_t index)
{
    try
    {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used == value.size())
            return x;
    }
    catch (const std::exception &)
    {
    }
    return static_cast<double>(index);
}

std::vector<std::string> split(const std::string &line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

} // namespace

void validate_sweep(const SweepSpec &spec)
{
    std::vector<std::string> problems;
    const auto keys = config_keys();
    if (std::find(keys.begin(), keys.end(), spec.param) == keys.end())
        problems.push_back("param: '" + spec.param + "' is not a configuration field");
    if (spec.values.empty())
        problems.push_back("values: empty list");
    if (spec.seeds.empty())
        problems.push_back("seeds: empty list");
    if (spec.algorithms.empty())
        problems.push_back("algorithms: empty list");
    if (std::set<std::int64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size())
        problems.push_back("seeds: duplicate entries");
    if (std::set<Algorithm>(spec.algorithms.begin(), spec.algorithms.end()).size() != spec.algorithms.size())
        problems.push_back("algorithms: duplicate entries");
    if (std::set<std::string>(spec.values.begin(), spec.values.end()).size() != spec.values.size())
        problems.push_back("values: duplicate entries");
    if (spec.codebook_size < 1)
        problems.push_back("codebook_size: must be positive");
    if (spec.workers < 0)
        problems.push_back("workers: must be non-negative");
    if (problems.empty())
    {
        for (const std::string &v : spec.values)
        {
            try
            {
                SystemConfig cfg = spec.base;
                set_config_value(cfg, spec.param, v);
                validate_config(cfg);
            }
            catch (const std::exception &e)
            {
                problems.push_back(spec.param + " = " + v + ": " + e.what());
            }
        }
    }
    if (!problems.empty())
    {
        std::string msg;
        for (const std::string &p : problems)
            msg += (msg.empty() ? "" : "\n") + p;
        throw ConfigError(msg);
    }
}

SweepResult run_sweep(const SweepSpec &spec, const SweepProgress &progress)
{
    validate_sweep(spec);

    struct Job
    {
        std::size_t value;
        std::size_t algo;
        std::size_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t v = 0; v < spec.values.size(); ++v)
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
            for (std::size_t s = 0; s < spec.seeds.size(); ++s)
                jobs.push_back({v, a, s});

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex report_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
        {
            const Job &job = jobs[i];
            SweepRow &row = rows[i];
            row.value = spec.values[job.value];
            row.x = value_to_x(row.value, job.value);
            row.algorithm = spec.algorithms[job.algo];
            row.seed = spec.seeds[job.seed];
            const auto start = std::chrono::steady_clock::now();
            try
            {
                SystemConfig cfg = spec.base;
                set_config_value(cfg, spec.param, row.value);
                const SolveRecord rec = run_algorithm(row.algorithm, build_scenario(cfg, row.seed), spec.codebook_size);
                row.sum_rate = rec.report.sum_rate;
                row.feasible = rec.feasible;
                row.failed = rec.failed;
                row.iterations = rec.iterations;
                row.message = rec.message;
            }
            catch (const std::exception &e)
            {
                row.failed = true;
                row.message = e.what();
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const std::size_t finished = ++done;
            if (progress)
            {
                std::lock_guard lock(report_mutex);
                progress(row, finished, jobs.size());
            }
        }
    };

    std::size_t count = spec.workers > 0 ? static_cast<std::size_t>(spec.workers) : std::thread::hardware_concurrency();
    count = std::clamp<std::size_t>(count, 1, jobs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < count; ++t)
            pool.emplace_back(worker);
        worker();
    }

    // Jobs were generated in (value, algorithm, seed) order; sort explicitly
    // on the same key so the table never depends on completion order.
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Job &x = jobs[a], &y = jobs[b];
        return std::tie(x.value, x.algo, x.seed) < std::tie(y.value, y.algo, y.seed);
    });
    SweepResult result;
    result.param = spec.param;
    for (std::size_t i : order)
        result.rows.push_back(std::move(rows[i]));
    return result;
}

std::string sweep_csv(const SweepResult &result)
{
    std::string out = kSweepHeader + "\n";
    for (const SweepRow &r : result.rows)
        out += r.value + "," + to_string(r.algorithm) + "," + std::to_string(r.seed) + "," + format_double(r.sum_rate) +
               "," + (r.feasible ? "1" : "0") + "," + std::to_string(r.iterations) + "," + format_double(r.seconds) +
               "\n";
    return out;
}

SweepResult parse_sweep_csv(const std::string &text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kSweepHeader)
        throw std::runtime_error("sweep csv: unexpected header");
    SweepResult result;
    std::map<std::string, std::size_t> seen;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        const auto cells = split(line, ',');
        if (cells.size() != 7)
            throw std::runtime_error("sweep csv: expected 7 columns in '" + line + "'");
        SweepRow r;
        r.value = cells[0];
        const std::size_t index = seen.emplace(r.value, seen.size()).first->second;
        r.x = value_to_x(r.value, index);
        r.algorithm = algorithm_from_string(cells[1]);
        r.seed = std::stoll(cells[2]);
        r.sum_rate = std::stod(cells[3]);
        r.feasible = cells[4] == "1";
        r.iterations = std::stoi(cells[5]);
        r.seconds = std::stod(cells[6]);
        result.rows.push_back(std::move(r));
    }
    return result;
}

std::vector<Aggregate> aggregate(const SweepResult &result)
{
    std::vector<Aggregate> table;
    std::vector<std::vector<double>> samples;
    for (const SweepRow &r : result.rows)
    {
        auto it = std::find_if(table.begin(), table.end(),
                               [&](const Aggregate &a) { return a.value == r.value && a.algorithm == r.algorithm; });
        if (it == table.end())
        {
            table.push_back({r.value, r.x, r.algorithm});
            samples.emplace_back();
            it = table.end() - 1;
        }
        samples[it - table.begin()].push_back(r.covert_rate());
    }
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        const auto &s = samples[i];
        double sum = 0.0;
        for (double v : s)
            sum += v;
        const double mean = sum / static_cast<double>(s.size());
        double ss = 0.0;
        for (double v : s)
            ss += (v - mean) * (v - mean);
        table[i].mean = mean;
        table[i].std = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
        table[i].n = static_cast<int>(s.size());
    }
    return table;
}

std::vector<std::filesystem::path> emit_plot_data(const std::vector<Aggregate> &table, const std::string &tag,
                                                  const std::filesystem::path &out_dir)
{
    if (table.empty())
        throw std::invalid_argument("emit_plot_data: no aggregated rows");
    std::vector<Algorithm> algos;
    for (const Aggregate &a : table)
        if (std::find(algos.begin(), algos.end(), a.algorithm) == algos.end())
            algos.push_back(a.algorithm);

    std::vector<std::filesystem::path> written;
    for (Algorithm algo : algos)
    {
        std::string text = "# x mean std n\n";
        for (const Aggregate &a : table)
            if (a.algorithm == algo)
                text += format_double(a.x) + " " + format_double(a.mean) + " " + format_double(a.std) + " " +
                        std::to_string(a.n) + "\n";
        const auto path = out_dir / (tag + "_" + to_string(algo) + ".dat");
        write_text_file(path, text);
        written.push_back(path);
    }
    return written;
}

void write_sweep_outputs(const SweepSpec &spec, const SweepResult &result)
{
    if (spec.out_dir.empty())
        return;
    write_text_file(spec.out_dir / (spec.param + ".csv"), sweep_csv(result));
    emit_plot_data(aggregate(result), spec.param, spec.out_dir);
}

} // namespace simcovert
