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
#include "simcovert/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <limits>

namespace simcovert
{

using nlohmann::json;

namespace
{

constexpr std::array<char, 8> kDumpMagic = {'S', 'I', 'M', 'C', 'V', 'D', 'M', 'P'};
constexpr std::uint32_t kDumpVersion = 1;
constexpr std::size_t kNameBytes = 16;

void put_u64(std::ostream &os, std::uint64_t v)
{
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

void put_u32(std::ostream &os, std::uint32_t v)
{
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

void put_f64(std::ostream &os, double v)
{
    put_u64(os, std::bit_cast<std::uint64_t>(v));
}

void need(std::istream &is, char *dst, std::size_t n)
{
    if (!is.read(dst, static_cast<std::streamsize>(n)))
        throw std::runtime_error("dump: unexpected end of data");
}

std::uint64_t get_u64(std::istream &is)
{
    unsigned char b[8];
    need(is, reinterpret_cast<char *>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | b[i];
    return v;
}

std::uint32_t get_u32(std::istream &is)
{
    unsigned char b[4];
    need(is, reinterpret_cast<char *>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream &is)
{
    return std::bit_cast<double>(get_u64(is));
}

json number(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

double number_or(const json &j, double fallback)
{
    return j.is_null() ? fallback : j.get<double>();
}

json matrix_json(const CMatrix<double> &m)
{
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
        {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix<double> matrix_from_json(const json &j)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto &re = j.at("re");
    const auto &im = j.at("im");
    if (re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
        throw std::runtime_error("record: matrix size mismatch");
    CMatrix<double> m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = {re[r * cols + c].get<double>(), im[r * cols + c].get<double>()};
    return m;
}

} // namespace

std::uint64_t config_hash(const SystemConfig &cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_config(cfg))
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string record_to_json(const SolveRecord &rec, int indent)
{
    json j;
    j["algorithm"] = to_string(rec.algorithm);
    j["seed"] = rec.seed;
    j["feasible"] = rec.feasible;
    j["failed"] = rec.failed;
    j["message"] = rec.message;
    j["iterations"] = rec.iterations;
    j["seconds"] = rec.seconds;
    j["report"] = {{"sum_rate", rec.report.sum_rate}, {"power_w", rec.report.power_w},
                   {"sinr", rec.report.sinr},         {"rate", rec.report.rate},
                   {"divergence", rec.report.divergence}, {"dep_floor", rec.report.dep_floor}};
    const Feasibility &f = rec.feasibility;
    j["feasibility"] = {{"rate_slack", f.rate_slack}, {"power_slack", f.power_slack},
                        {"kl_slack", f.kl_slack},     {"unit_modulus_error", f.unit_modulus_error},
                        {"qos_ok", f.qos_ok},         {"power_ok", f.power_ok},
                        {"covert_ok", f.covert_ok},   {"unit_modulus_ok", f.unit_modulus_ok}};
    j["stats"] = {{"solves", rec.stats.solves}, {"softened", rec.stats.softened}, {"rejected", rec.stats.rejected}};
    j["beamformers"] = matrix_json(rec.beamformers);
    json phases = json::array();
    for (int l = 0; l < rec.phases.num_layers(); ++l)
        phases.push_back(std::vector<double>(rec.phases.theta(l).begin(), rec.phases.theta(l).end()));
    j["phases"] = phases;
    json trace = json::array();
    for (const TraceEntry &e : rec.trace)
        trace.push_back({{"iteration", e.iteration},
                         {"objective", number(e.objective)},
                         {"sum_rate", e.sum_rate},
                         {"max_violation", e.violation},
                         {"feasible", e.feasible},
                         {"penalty", e.penalty},
                         {"step", e.step},
                         {"backtracks", e.backtracks}});
    j["trace"] = trace;
    return j.dump(indent);
}

SolveRecord record_from_json(const std::string &text)
{
    const json j = json::parse(text);
    SolveRecord rec;
    rec.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    rec.seed = j.at("seed").get<std::int64_t>();
    rec.feasible = j.at("feasible").get<bool>();
    rec.failed = j.at("failed").get<bool>();
    rec.message = j.at("message").get<std::string>();
    rec.iterations = j.at("iterations").get<int>();
    rec.seconds = j.at("seconds").get<double>();
    const json &r = j.at("report");
    rec.report.sum_rate = r.at("sum_rate").get<double>();
    rec.report.power_w = r.at("power_w").get<double>();
    rec.report.sinr = r.at("sinr").get<std::vector<double>>();
    rec.report.rate = r.at("rate").get<std::vector<double>>();
    rec.report.divergence = r.at("divergence").get<std::vector<double>>();
    rec.report.dep_floor = r.at("dep_floor").get<std::vector<double>>();
    const json &f = j.at("feasibility");
    rec.feasibility.rate_slack = f.at("rate_slack").get<std::vector<double>>();
    rec.feasibility.power_slack = f.at("power_slack").get<double>();
    rec.feasibility.kl_slack = f.at("kl_slack").get<std::vector<double>>();
    rec.feasibility.unit_modulus_error = f.at("unit_modulus_error").get<double>();
    rec.feasibility.qos_ok = f.at("qos_ok").get<bool>();
    rec.feasibility.power_ok = f.at("power_ok").get<bool>();
    rec.feasibility.covert_ok = f.at("covert_ok").get<bool>();
    rec.feasibility.unit_modulus_ok = f.at("unit_modulus_ok").get<bool>();
    const json &s = j.at("stats");
    rec.stats.solves = s.at("solves").get<int>();
    rec.stats.softened = s.at("softened").get<int>();
    rec.stats.rejected = s.at("rejected").get<int>();
    rec.beamformers = matrix_from_json(j.at("beamformers"));
    const json &ph = j.at("phases");
    if (!ph.empty())
    {
        rec.phases = PhaseState<double>(static_cast<int>(ph.size()), static_cast<int>(ph[0].size()));
        for (std::size_t l = 0; l < ph.size(); ++l)
        {
            const auto theta = ph[l].get<std::vector<double>>();
            rec.phases.set_layer(static_cast<int>(l), Eigen::Map<const RVector<double>>(theta.data(), theta.size()));
        }
    }
    for (const json &e : j.at("trace"))
    {
        TraceEntry t;
        t.iteration = e.at("iteration").get<int>();
        t.objective = number_or(e.at("objective"), -std::numeric_limits<double>::infinity());
        t.sum_rate = e.at("sum_rate").get<double>();
        t.violation = e.at("max_violation").get<double>();
        t.feasible = e.at("feasible").get<bool>();
        t.penalty = e.at("penalty").get<double>();
        t.step = e.at("step").get<double>();
        t.backtracks = e.at("backtracks").get<int>();
        rec.trace.push_back(t);
    }
    return rec;
}

std::string trace_csv(const SolveRecord &rec)
{
    std::string out = "iteration,objective,sum_rate,max_violation,feasible,penalty,step,backtracks\n";
    for (const TraceEntry &e : rec.trace)
        out += std::to_string(e.iteration) + "," + format_double(e.objective) + "," + format_double(e.sum_rate) + "," +
               format_double(e.violation) + "," + (e.feasible ? "1" : "0") + "," + format_double(e.penalty) + "," +
               format_double(e.step) + "," + std::to_string(e.backtracks) + "\n";
    return out;
}

Dump make_dump(const SystemConfig &cfg, const SimStack<double> &stack, const ChannelSet<double> &ch,
               const SolveRecord *record)
{
    Dump d;
    d.config_hash = config_hash(cfg);
    for (int l = 0; l < stack.num_layers(); ++l)
        d.blocks.push_back({"W" + std::to_string(l + 1), stack.feed(l)});
    for (int k = 0; k < ch.num_users(); ++k)
        d.blocks.push_back({"h_user_" + std::to_string(k + 1), ch.users[k]});
    for (int u = 0; u < ch.num_wardens(); ++u)
        d.blocks.push_back({"h_warden_" + std::to_string(u + 1), ch.wardens[u]});
    if (record != nullptr && record->phases.num_layers() == stack.num_layers())
    {
        d.blocks.push_back({"V", record->beamformers});
        d.blocks.push_back({"G", sim_response(stack, record->phases)});
    }
    return d;
}

void write_dump(std::ostream &os, const Dump &dump)
{
    os.write(kDumpMagic.data(), kDumpMagic.size());
    put_u32(os, kDumpVersion);
    put_u32(os, static_cast<std::uint32_t>(dump.blocks.size()));
    put_u64(os, dump.config_hash);
    for (const DumpBlock &b : dump.blocks)
    {
        if (b.name.size() > kNameBytes)
            throw std::invalid_argument("dump: block name longer than 16 bytes: " + b.name);
        char name[kNameBytes] = {};
        std::memcpy(name, b.name.data(), b.name.size());
        os.write(name, kNameBytes);
        put_u64(os, static_cast<std::uint64_t>(b.data.rows()));
        put_u64(os, static_cast<std::uint64_t>(b.data.cols()));
        for (Eigen::Index r = 0; r < b.data.rows(); ++r)
            for (Eigen::Index c = 0; c < b.data.cols(); ++c)
            {
                put_f64(os, b.data(r, c).real());
                put_f64(os, b.data(r, c).imag());
            }
    }
    if (!os)
        throw std::runtime_error("dump: write failed");
}

Dump read_dump(std::istream &is)
{
    std::array<char, 8> magic{};
    need(is, magic.data(), magic.size());
    if (magic != kDumpMagic)
        throw std::runtime_error("dump: bad magic");
    if (get_u32(is) != kDumpVersion)
        throw std::runtime_error("dump: unsupported version");
    const std::uint32_t count = get_u32(is);
    Dump d;
    d.config_hash = get_u64(is);
    for (std::uint32_t i = 0; i < count; ++i)
    {
        char name[kNameBytes];
        need(is, name, kNameBytes);
        DumpBlock b;
        b.name.assign(name, strnlen(name, kNameBytes));
        const auto rows = static_cast<Eigen::Index>(get_u64(is));
        const auto cols = static_cast<Eigen::Index>(get_u64(is));
        b.data.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
            {
                const double re = get_f64(is);
                b.data(r, c) = {re, get_f64(is)};
            }
        d.blocks.push_back(std::move(b));
    }
    return d;
}

void write_dump_file(const std::filesystem::path &path, const Dump &dump)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_dump(os, dump);
}

Dump read_dump_file(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    return read_dump(is);
}

void write_text_file(const std::filesystem::path &path, const std::string &text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os)
        throw std::runtime_error("write failed: " + path.string());
}

} // namespace simcovert
