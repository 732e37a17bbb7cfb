#include "cbrw/model.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cbrw/errors.hpp"

namespace cbrw {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "." + key + ": missing");
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

long integer_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<long>();
}

WalkSpec parse_walk(const json& j) {
    const json& type = field(j, "type", "walk");
    if (!type.is_string()) throw ConfigError("walk.type: expected a string");
    const std::string t = type.get<std::string>();
    if (t == "simple") {
        double p = number_at(field(j, "p", "walk"), "walk.p");
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("walk.p: must lie in (0,1)");
        return WalkSpec::simple(p);
    }
    if (t == "general") {
        const json& rates = field(j, "rates", "walk");
        if (!rates.is_object() || rates.empty()) throw ConfigError("walk.rates: expected a non-empty object");
        std::map<int, double> m;
        for (auto it = rates.begin(); it != rates.end(); ++it) {
            int off;
            try {
                std::size_t pos = 0;
                off = std::stoi(it.key(), &pos);
                if (pos != it.key().size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ConfigError("walk.rates: key \"" + it.key() + "\" is not an integer offset");
            }
            double r = number_at(*it, "walk.rates[\"" + it.key() + "\"]");
            if (r < 0.0) throw ConfigError("walk.rates[\"" + it.key() + "\"]: must be nonnegative");
            m[off] = r;
        }
        try {
            return WalkSpec::general(m);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("walk.rates: ") + e.what());
        }
    }
    throw ConfigError("walk.type: must be \"simple\" or \"general\"");
}

OffspringDist parse_offspring(const json& j, const std::string& path) {
    if (!j.is_object() || j.empty()) throw ConfigError(path + ": expected a non-empty object");
    std::map<int, double> pmf;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int k;
        try {
            std::size_t pos = 0;
            k = std::stoi(it.key(), &pos);
            if (pos != it.key().size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError(path + ": key \"" + it.key() + "\" is not an integer count");
        }
        if (k < 0) throw ConfigError(path + ": offspring counts must be nonnegative");
        pmf[k] = number_at(*it, path + "[\"" + it.key() + "\"]");
    }
    try {
        return OffspringDist(pmf);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace

Model load_model(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    WalkSpec walk = parse_walk(field(j, "walk", "config"));

    const json& cats = field(j, "catalysts", "config");
    if (!cats.is_array() || cats.empty()) throw ConfigError("catalysts: expected a non-empty array");
    std::vector<Catalyst> entries;
    for (std::size_t i = 0; i < cats.size(); ++i) {
        const std::string path = "catalysts[" + std::to_string(i) + "]";
        const json& c = cats[i];
        long pos = integer_at(field(c, "position", path), path + ".position");
        double alpha = number_at(field(c, "alpha", path), path + ".alpha");
        if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError(path + ".alpha: must lie in [0,1)");
        double beta = number_at(field(c, "beta", path), path + ".beta");
        if (!(beta > 0.0)) throw ConfigError(path + ".beta: must be positive");
        OffspringDist off = parse_offspring(field(c, "offspring", path), path + ".offspring");
        entries.push_back(Catalyst{pos, alpha, beta, std::move(off)});
    }

    long start = integer_at(field(j, "start", "config"), "start");

    try {
        return Model{std::move(walk), CatalystSet(std::move(entries)), start};
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("catalysts: ") + e.what());
    }
}

Model load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

std::string canonical_config_dump(const Model& model) {
    json j;
    if (model.walk.is_simple()) {
        j["walk"] = {{"type", "simple"}, {"p", model.walk.up_prob()}};
    } else {
        json rates = json::object();
        for (const auto& [off, pr] : model.walk.step_dist()) rates[std::to_string(off)] = pr;
        j["walk"] = {{"type", "general"}, {"rates", rates}};
    }
    json cats = json::array();
    for (std::size_t i = 0; i < model.catalysts.size(); ++i) {
        const Catalyst& c = model.catalysts[i];
        json off = json::object();
        for (const auto& [k, p] : c.offspring.support()) off[std::to_string(k)] = p;
        cats.push_back({{"position", c.position}, {"alpha", c.alpha}, {"beta", c.beta}, {"offspring", off}});
    }
    j["catalysts"] = cats;
    j["start"] = model.start;
    return j.dump();  // object keys are kept sorted by the default map container
}

std::uint64_t config_digest(const Model& model) {
    const std::string s = canonical_config_dump(model);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace cbrw
