#include "cse/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

namespace {

constexpr std::pair<Scenario, std::string_view> kScenarioNames[] = {
    {Scenario::NormTrace, "norm-trace"},
    {Scenario::FieldEvolution, "field-evolution"},
    {Scenario::CoherenceVsTime, "coherence-vs-time"},
    {Scenario::CoherenceVsN, "coherence-vs-N"},
    {Scenario::FomSweep, "fom-sweep"},
    {Scenario::AsymX, "asym-x"},
    {Scenario::AsymZ, "asym-z"},
    {Scenario::Spectrum, "spectrum"},
    {Scenario::ZobsSensitivity, "zobs-sensitivity"},
};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(key + ": '" + v + "' is not a number");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(key, trim(item)));
    return out;
}

Vec3 parse_vec3(const std::string& key, const std::string& v)
{
    const auto xs = parse_list(key, v);
    if (xs.size() != 3)
        throw ConfigError(key + ": expected three components");
    return {xs[0], xs[1], xs[2]};
}

std::string join(const std::vector<double>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i ? "," : "") + format_number(xs[i]);
    return out;
}

using Entries = std::vector<std::pair<std::string, std::string>>;

Entries read_entries(std::istream& in)
{
    Entries out;
    std::map<std::string, int> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'section.key = value'");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.find('.') == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                              "' is missing its section");
        if (seen[key]++)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void apply(RunConfig& c, const std::string& key, const std::string& v)
{
    if (key == "cloud.N") c.cloud.N = parse_uint(key, v);
    else if (key == "cloud.Lx") c.cloud.Lx = parse_double(key, v);
    else if (key == "cloud.Ly") c.cloud.Ly = parse_double(key, v);
    else if (key == "cloud.Lz") c.cloud.Lz = parse_double(key, v);
    else if (key == "cloud.dipole_axis") c.cloud.dipole_axis = parse_vec3(key, v);
    else if (key == "cloud.laser_axis") c.cloud.laser_axis = parse_vec3(key, v);
    else if (key == "run.scenario") c.scenario = parse_scenario(v);
    else if (key == "run.instances") c.instances = parse_uint(key, v);
    else if (key == "run.base_seed") c.base_seed = parse_uint(key, v);
    else if (key == "run.threads") c.threads = parse_uint(key, v);
    else if (key == "run.output") c.output = v;
    else if (key == "run.representative") c.representative = parse_bool(key, v);
    else if (key == "run.times") c.times = parse_list(key, v);
    else if (key == "evolution.norm_step") c.norm_step = parse_double(key, v);
    else if (key == "grid.z_obs") c.grid.z_obs = parse_double(key, v);
    else if (key == "grid.x_span") c.grid.x_span = parse_double(key, v);
    else if (key == "grid.y_span") c.grid.y_span = parse_double(key, v);
    else if (key == "grid.spacing") c.grid.spacing = parse_double(key, v);
    else if (key == "analysis.window") c.window = parse_double(key, v);
    else if (key == "analysis.t_fit") c.t_fit = parse_double(key, v);
    else if (key == "sweep.values") c.sweep_values = parse_list(key, v);
    else if (key == "sweep.density") c.sweep_density = parse_double(key, v);
    else if (key == "export.field_maps") c.export_field_maps = parse_bool(key, v);
    else if (key == "export.graymaps") c.export_graymaps = parse_bool(key, v);
    else if (key == "export.positions") c.export_positions = parse_bool(key, v);
    else if (key == "export.spectra") c.export_spectra = parse_bool(key, v);
    else throw ConfigError("unknown key '" + key + "'");
}

}  // namespace

std::string_view to_string(Scenario s)
{
    for (const auto& [sc, name] : kScenarioNames)
        if (sc == s)
            return name;
    return "?";
}

Scenario parse_scenario(std::string_view name)
{
    for (const auto& [sc, n] : kScenarioNames)
        if (n == name)
            return sc;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

bool is_sweep(Scenario s)
{
    return s == Scenario::CoherenceVsN || s == Scenario::FomSweep || s == Scenario::AsymX ||
           s == Scenario::AsymZ || s == Scenario::ZobsSensitivity;
}

void RunConfig::validate() const
{
    cloud.validate();
    grid.validate(cloud);
    if (instances == 0)
        throw ConfigError("run.instances must be at least 1");
    if (threads == 0)
        throw ConfigError("run.threads must be at least 1");
    if (times.empty() || times.front() != 0.0)
        throw ConfigError("run.times must start at 0");
    if (!std::is_sorted(times.begin(), times.end()) ||
        std::adjacent_find(times.begin(), times.end()) != times.end())
        throw ConfigError("run.times must be strictly ascending");
    if (!(norm_step > 0.0))
        throw ConfigError("evolution.norm_step must be positive");
    if (!(window > 0.0) || window > grid.x_span + 1e-9 || window > grid.y_span + 1e-9)
        throw ConfigError("analysis.window must be positive and within the grid spans");
    if (!(t_fit >= 0.0))
        throw ConfigError("analysis.t_fit must be non-negative");
    if (!(sweep_density > 0.0))
        throw ConfigError("sweep.density must be positive");
    if (is_sweep(scenario)) {
        if (sweep_values.empty())
            throw ConfigError("sweep.values is required for scenario " +
                              std::string(to_string(scenario)));
        if (std::find(times.begin(), times.end(), t_fit) == times.end())
            throw ConfigError("analysis.t_fit must be one of run.times");
        for (double v : sweep_values)
            if (!(v > 0.0))
                throw ConfigError("sweep.values must be positive");
    }
}

CloudSpec RunConfig::cloud_for(std::size_t instance) const
{
    CloudSpec s = cloud;
    s.seed = base_seed + instance;
    return s;
}

RunConfig defaults_for(Scenario s)
{
    RunConfig c;
    c.scenario = s;
    switch (s) {
    case Scenario::NormTrace:
        c.times = {0, 10, 20, 30, 40};
        break;
    case Scenario::FieldEvolution:
        c.export_field_maps = true;
        c.export_graymaps = true;
        break;
    case Scenario::CoherenceVsTime:
        break;
    case Scenario::CoherenceVsN:
        c.sweep_values = {200, 500, 1000, 1500, 2000, 3000};
        c.times = {0, 40};
        break;
    case Scenario::FomSweep:
        c.sweep_values = {50, 100, 200, 500, 1000, 1500, 2000, 3000, 4000};
        c.times = {0, 40};
        break;
    case Scenario::AsymX:
        c.cloud.Lx = 80;
        c.cloud.Ly = 40;
        c.cloud.Lz = 20;
        c.sweep_values = {200, 500, 1000, 1500, 2000, 3000};
        break;
    case Scenario::AsymZ:
        c.cloud.Lx = 20;
        c.cloud.Ly = 40;
        c.cloud.Lz = 80;
        c.sweep_values = {200, 500, 1000, 1500, 2000, 3000};
        break;
    case Scenario::Spectrum:
        c.export_spectra = true;
        break;
    case Scenario::ZobsSensitivity:
        c.sweep_values = {60, 100, 200, 400};
        c.times = {0, 40};
        break;
    }
    return c;
}

RunConfig parse_config(std::istream& in, std::optional<Scenario> override)
{
    const Entries entries = read_entries(in);
    Scenario scenario = Scenario::CoherenceVsTime;
    for (const auto& [k, v] : entries)
        if (k == "run.scenario")
            scenario = parse_scenario(v);
    if (override)
        scenario = *override;
    RunConfig c = defaults_for(scenario);
    for (const auto& [k, v] : entries)
        apply(c, k, v);
    c.scenario = scenario;
    return c;
}

RunConfig parse_config_text(std::string_view text, std::optional<Scenario> override)
{
    std::istringstream in{std::string(text)};
    return parse_config(in, override);
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Scenario> override)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    if (path.extension() == ".json") {
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
        if (!meta.contains("config_text"))
            throw ConfigError(path.string() + ": no config_text entry");
        return parse_config_text(meta["config_text"].get<std::string>(), override);
    }
    return parse_config(in, override);
}

std::string to_config_text(const RunConfig& c)
{
    auto vec = [](const Vec3& v) { return join({v.x(), v.y(), v.z()}); };
    auto b = [](bool x) { return std::string(x ? "true" : "false"); };
    std::ostringstream out;
    out << "run.scenario = " << to_string(c.scenario) << '\n'
        << "run.instances = " << c.instances << '\n'
        << "run.base_seed = " << c.base_seed << '\n'
        << "run.threads = " << c.threads << '\n'
        << "run.output = " << c.output.string() << '\n'
        << "run.representative = " << b(c.representative) << '\n'
        << "run.times = " << join(c.times) << '\n'
        << "cloud.N = " << c.cloud.N << '\n'
        << "cloud.Lx = " << format_number(c.cloud.Lx) << '\n'
        << "cloud.Ly = " << format_number(c.cloud.Ly) << '\n'
        << "cloud.Lz = " << format_number(c.cloud.Lz) << '\n'
        << "cloud.dipole_axis = " << vec(c.cloud.dipole_axis) << '\n'
        << "cloud.laser_axis = " << vec(c.cloud.laser_axis) << '\n'
        << "evolution.norm_step = " << format_number(c.norm_step) << '\n'
        << "grid.z_obs = " << format_number(c.grid.z_obs) << '\n'
        << "grid.x_span = " << format_number(c.grid.x_span) << '\n'
        << "grid.y_span = " << format_number(c.grid.y_span) << '\n'
        << "grid.spacing = " << format_number(c.grid.spacing) << '\n'
        << "analysis.window = " << format_number(c.window) << '\n'
        << "analysis.t_fit = " << format_number(c.t_fit) << '\n';
    if (!c.sweep_values.empty())
        out << "sweep.values = " << join(c.sweep_values) << '\n';
    out << "sweep.density = " << format_number(c.sweep_density) << '\n'
        << "export.field_maps = " << b(c.export_field_maps) << '\n'
        << "export.graymaps = " << b(c.export_graymaps) << '\n'
        << "export.positions = " << b(c.export_positions) << '\n'
        << "export.spectra = " << b(c.export_spectra) << '\n';
    return out.str();
}

}  // namespace cse
