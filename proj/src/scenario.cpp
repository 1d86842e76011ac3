// SPDX-License-Identifier: Apache-2.0
#include "pass/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace pass {

namespace {

class Reader {
public:
    explicit Reader(std::string_view source) : source_(source) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& key,
                           const std::string& what) const
    {
        const auto mark = node.Mark();
        if (mark.is_null())
            throw ScenarioError(fmt::format("{}: '{}': {}", source_, key, what));
        throw ScenarioError(fmt::format("{}:{}: '{}': {}", source_, mark.line + 1, key, what));
    }

    double number(const YAML::Node& node, const std::string& key) const
    {
        if (!node.IsScalar())
            fail(node, key, "expected a number");
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, key, fmt::format("expected a number, got '{}'", node.Scalar()));
        }
    }

    std::uint64_t count(const YAML::Node& node, const std::string& key) const
    {
        if (!node.IsScalar())
            fail(node, key, "expected a non-negative integer");
        try {
            return node.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(node, key, fmt::format("expected a non-negative integer, got '{}'", node.Scalar()));
        }
    }

    Vec3 vec3(const YAML::Node& node, const std::string& key) const
    {
        if (!node.IsSequence() || node.size() != 3)
            fail(node, key, "expected a list of three numbers [x, y, z]");
        return {number(node[0], key), number(node[1], key), number(node[2], key)};
    }

    void only_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                   const std::string& context) const
    {
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key))
                fail(kv.first, context.empty() ? key : context + "." + key, "unknown key");
        }
    }

    const YAML::Node require(const YAML::Node& map, const std::string& key,
                             const std::string& context) const
    {
        const YAML::Node node = map[key];
        if (!node)
            fail(map, context.empty() ? key : context + "." + key, "missing required key");
        return node;
    }

private:
    std::string source_;
};

const std::set<std::string> kTopKeys = {
    "frequency_ghz",   "n_eff",           "attenuation_db_per_m", "noise_dbm",
    "seed",            "power_model",     "candidate_spacing_m",  "pa_per_waveguide",
    "array_gain_spacing_m", "bs_position_m", "massive_antennas_per_rf", "waveguides",
    "users_m"};

void require_positive(double v, const char* key)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw ScenarioError(fmt::format("'{}' must be > 0, got {}", key, v));
}

} // namespace

double Scenario::noise_watts() const
{
    return std::pow(10.0, (noise_dbm - 30.0) / 10.0);
}

RadioParams Scenario::radio() const
{
    return RadioParams::from_wavelength(wavelength(), noise_watts());
}

void Scenario::validate() const
{
    require_positive(frequency_ghz, "frequency_ghz");
    if (!(n_eff >= 1.0) || !std::isfinite(n_eff))
        throw ScenarioError(fmt::format("'n_eff' must be >= 1, got {}", n_eff));
    if (!(attenuation_db_per_m >= 0.0) || !std::isfinite(attenuation_db_per_m))
        throw ScenarioError(
            fmt::format("'attenuation_db_per_m' must be >= 0, got {}", attenuation_db_per_m));
    if (!std::isfinite(noise_dbm))
        throw ScenarioError("'noise_dbm' must be finite");
    require_positive(candidate_spacing_m, "candidate_spacing_m");
    require_positive(array_gain_spacing_m, "array_gain_spacing_m");
    if (pa_per_waveguide == 0)
        throw ScenarioError("'pa_per_waveguide' must be >= 1");
    if (massive_antennas_per_rf == 0)
        throw ScenarioError("'massive_antennas_per_rf' must be >= 1");
    if (!bs_position_m.allFinite())
        throw ScenarioError("'bs_position_m' must be finite");
    if (waveguides.empty())
        throw ScenarioError("'waveguides' must list at least one waveguide");
    if (users_m.empty())
        throw ScenarioError("'users_m' must list at least one user");
    for (std::size_t w = 0; w < waveguides.size(); ++w) {
        const auto& wg = waveguides[w];
        if (!(wg.length > 0.0) || !std::isfinite(wg.length))
            throw ScenarioError(fmt::format("'waveguides[{}].length_m' must be > 0, got {}", w, wg.length));
        try {
            wg.validate();
        } catch (const ValidationError& e) {
            throw ScenarioError(fmt::format("'waveguides[{}]': {}", w, e.what()));
        }
    }
    for (std::size_t k = 0; k < users_m.size(); ++k)
        if (!users_m[k].allFinite())
            throw ScenarioError(fmt::format("'users_m[{}]' must be finite", k));
}

bool operator==(const Scenario& a, const Scenario& b)
{
    auto same_guides = [&] {
        if (a.waveguides.size() != b.waveguides.size())
            return false;
        for (std::size_t w = 0; w < a.waveguides.size(); ++w) {
            const auto& x = a.waveguides[w];
            const auto& y = b.waveguides[w];
            if (x.feed_point != y.feed_point || x.axis != y.axis || x.length != y.length ||
                x.refractive_index != y.refractive_index ||
                x.attenuation_db_per_m != y.attenuation_db_per_m)
                return false;
        }
        return true;
    };
    return a.frequency_ghz == b.frequency_ghz && a.n_eff == b.n_eff &&
           a.attenuation_db_per_m == b.attenuation_db_per_m && a.noise_dbm == b.noise_dbm &&
           a.seed == b.seed && a.power_model == b.power_model &&
           a.candidate_spacing_m == b.candidate_spacing_m &&
           a.pa_per_waveguide == b.pa_per_waveguide &&
           a.array_gain_spacing_m == b.array_gain_spacing_m &&
           a.bs_position_m == b.bs_position_m &&
           a.massive_antennas_per_rf == b.massive_antennas_per_rf && same_guides() &&
           a.users_m == b.users_m;
}

Scenario parse_scenario(std::string_view text, std::string_view source)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ScenarioError(fmt::format("{}:{}: parse error: {}", source, e.mark.line + 1, e.msg));
    }
    const Reader rd(source);
    if (!root.IsMap())
        throw ScenarioError(fmt::format("{}: expected a map of scenario keys", source));
    rd.only_keys(root, kTopKeys, "");

    Scenario s;
    s.frequency_ghz = rd.number(rd.require(root, "frequency_ghz", ""), "frequency_ghz");
    if (root["n_eff"])
        s.n_eff = rd.number(root["n_eff"], "n_eff");
    if (root["attenuation_db_per_m"])
        s.attenuation_db_per_m = rd.number(root["attenuation_db_per_m"], "attenuation_db_per_m");
    if (root["noise_dbm"])
        s.noise_dbm = rd.number(root["noise_dbm"], "noise_dbm");
    if (root["seed"])
        s.seed = rd.count(root["seed"], "seed");
    if (root["candidate_spacing_m"])
        s.candidate_spacing_m = rd.number(root["candidate_spacing_m"], "candidate_spacing_m");
    if (root["pa_per_waveguide"])
        s.pa_per_waveguide = rd.count(root["pa_per_waveguide"], "pa_per_waveguide");
    if (root["array_gain_spacing_m"])
        s.array_gain_spacing_m = rd.number(root["array_gain_spacing_m"], "array_gain_spacing_m");
    if (root["bs_position_m"])
        s.bs_position_m = rd.vec3(root["bs_position_m"], "bs_position_m");
    if (root["massive_antennas_per_rf"])
        s.massive_antennas_per_rf = rd.count(root["massive_antennas_per_rf"], "massive_antennas_per_rf");

    if (const auto pm = root["power_model"]) {
        if (pm.IsScalar()) {
            const auto kind = pm.as<std::string>();
            if (kind != "equal")
                rd.fail(pm, "power_model", "scalar form only accepts 'equal'; use {type: proportional, alpha: ...}");
        } else if (pm.IsMap()) {
            rd.only_keys(pm, {"type", "alpha"}, "power_model");
            const auto type = rd.require(pm, "type", "power_model").as<std::string>();
            if (type == "equal") {
                if (pm["alpha"])
                    rd.fail(pm["alpha"], "power_model.alpha", "only valid for the proportional model");
                s.power_model = PowerModel::equal();
            } else if (type == "proportional") {
                const double alpha = rd.number(rd.require(pm, "alpha", "power_model"), "power_model.alpha");
                if (!(alpha > 0.0 && alpha <= 1.0))
                    rd.fail(pm["alpha"], "power_model.alpha", fmt::format("must lie in (0, 1], got {}", alpha));
                s.power_model = PowerModel::proportional(alpha);
            } else {
                rd.fail(pm["type"], "power_model.type",
                        fmt::format("expected 'equal' or 'proportional', got '{}'", type));
            }
        } else {
            rd.fail(pm, "power_model", "expected 'equal' or a map with type/alpha");
        }
    }

    const auto guides = rd.require(root, "waveguides", "");
    if (!guides.IsSequence())
        rd.fail(guides, "waveguides", "expected a list");
    for (std::size_t w = 0; w < guides.size(); ++w) {
        const auto node = guides[w];
        const auto ctx = fmt::format("waveguides[{}]", w);
        if (!node.IsMap())
            rd.fail(node, ctx, "expected a map with feed_m, axis, length_m");
        rd.only_keys(node, {"feed_m", "axis", "length_m"}, ctx);
        WaveguideLayout wg;
        wg.feed_point = rd.vec3(rd.require(node, "feed_m", ctx), ctx + ".feed_m");
        const Vec3 axis = rd.vec3(rd.require(node, "axis", ctx), ctx + ".axis");
        if (!(axis.norm() > 0.0))
            rd.fail(node["axis"], ctx + ".axis", "must be a nonzero vector");
        // Already-unit axes are kept bit-for-bit so normalisation is idempotent.
        wg.axis = std::abs(axis.norm() - 1.0) <= 1e-12 ? axis : axis.normalized();
        wg.length = rd.number(rd.require(node, "length_m", ctx), ctx + ".length_m");
        if (!(wg.length > 0.0))
            rd.fail(node["length_m"], ctx + ".length_m", fmt::format("length must be > 0, got {}", wg.length));
        s.waveguides.push_back(wg);
    }

    const auto users = rd.require(root, "users_m", "");
    if (!users.IsSequence())
        rd.fail(users, "users_m", "expected a list of [x, y, z] points");
    for (std::size_t k = 0; k < users.size(); ++k)
        s.users_m.push_back(rd.vec3(users[k], fmt::format("users_m[{}]", k)));

    for (auto& wg : s.waveguides) {
        wg.refractive_index = s.n_eff;
        wg.attenuation_db_per_m = s.attenuation_db_per_m;
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(fmt::format("{}: cannot open scenario file", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.string());
}

std::string normalize(const Scenario& s)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    auto vec = [&](const Vec3& v) {
        out << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << v.z() << YAML::EndSeq;
    };

    out << YAML::BeginMap;
    out << YAML::Key << "frequency_ghz" << YAML::Value << s.frequency_ghz;
    out << YAML::Key << "n_eff" << YAML::Value << s.n_eff;
    out << YAML::Key << "attenuation_db_per_m" << YAML::Value << s.attenuation_db_per_m;
    out << YAML::Key << "noise_dbm" << YAML::Value << s.noise_dbm;
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::Key << "power_model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "type" << YAML::Value << s.power_model.name();
    if (s.power_model.kind() == PowerModel::Kind::Proportional)
        out << YAML::Key << "alpha" << YAML::Value << s.power_model.ratio();
    out << YAML::EndMap;
    out << YAML::Key << "candidate_spacing_m" << YAML::Value << s.candidate_spacing_m;
    out << YAML::Key << "pa_per_waveguide" << YAML::Value << s.pa_per_waveguide;
    out << YAML::Key << "array_gain_spacing_m" << YAML::Value << s.array_gain_spacing_m;
    out << YAML::Key << "bs_position_m" << YAML::Value;
    vec(s.bs_position_m);
    out << YAML::Key << "massive_antennas_per_rf" << YAML::Value << s.massive_antennas_per_rf;
    out << YAML::Key << "waveguides" << YAML::Value << YAML::BeginSeq;
    for (const auto& wg : s.waveguides) {
        out << YAML::BeginMap;
        out << YAML::Key << "feed_m" << YAML::Value;
        vec(wg.feed_point);
        out << YAML::Key << "axis" << YAML::Value;
        vec(wg.axis);
        out << YAML::Key << "length_m" << YAML::Value << wg.length;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "users_m" << YAML::Value << YAML::BeginSeq;
    for (const auto& u : s.users_m)
        vec(u);
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace pass
