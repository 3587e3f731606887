#include "seedplan/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace seedplan {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::parse, "cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw Error(Errc::parse, std::string(key) + " must be a number");
    return v.get<double>();
}

long long integer(const json& j, const char* key, long long fallback, bool required = false) {
    if (!j.contains(key)) {
        if (required) throw Error(Errc::parse, std::string(key) + " is required");
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw Error(Errc::parse, std::string(key) + " must be an integer");
    return v.get<long long>();
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("scenario: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::parse, "scenario must be a JSON object");

    Scenario sc;
    try {
        if (j.contains("stream")) {
            const json& s = j.at("stream");
            if (!s.is_object()) throw Error(Errc::parse, "stream must be an object");
            sc.params.r = num(s, "r", sc.params.r);
            sc.params.a = num(s, "a", sc.params.a);
            sc.params.b = num(s, "b", sc.params.b);
            sc.params.a_r = num(s, "a_r", sc.params.a_r);
            sc.params.b_r = num(s, "b_r", sc.params.b_r);
        }
        if (j.contains("servers")) sc.pop.n_server_copies = num(j.at("servers"), "n_c", 1.0);
        if (!j.contains("leechers")) throw Error(Errc::parse, "leechers section is required");
        sc.pop.n_leechers =
            static_cast<int>(integer(j.at("leechers"), "count", 0, /*required=*/true));
        if (j.contains("seeders")) {
            const json& arr = j.at("seeders");
            if (!arr.is_array()) throw Error(Errc::parse, "seeders must be an array");
            for (const json& e : arr) {
                if (!e.is_object()) throw Error(Errc::parse, "seeder entries must be objects");
                SeederSpec spec;
                if (!e.contains("upload")) throw Error(Errc::parse, "seeder upload is required");
                spec.upload = num(e, "upload", 0.0);
                if (e.contains("fanout")) spec.fanout_cap = integer(e, "fanout", 0);
                long long n = integer(e, "count", 1);
                if (n < 1) throw Error(Errc::parse, "seeder count must be at least 1");
                for (long long i = 0; i < n; ++i) sc.pop.seeders.push_back(spec);
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("scenario: ") + e.what());
    }
    sc.params.check();
    sc.pop.check();
    return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(slurp(path)); }

DiffusionScheme parse_scheme(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("scheme: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::parse, "scheme must be a JSON object");

    DiffusionScheme scheme;
    try {
        scheme.slot_count = static_cast<int>(integer(j, "slot_count", 0, /*required=*/true));
        if (j.contains("edges")) {
            const json& arr = j.at("edges");
            if (!arr.is_array()) throw Error(Errc::parse, "edges must be an array");
            for (const json& e : arr) {
                Edge edge;
                if (!e.contains("from") || !e.contains("to") || !e.contains("slots"))
                    throw Error(Errc::parse, "edges need from, to and slots");
                edge.from = NodeId::parse(e.at("from").get<std::string>());
                edge.to = NodeId::parse(e.at("to").get<std::string>());
                const json& slots = e.at("slots");
                if (!slots.is_array()) throw Error(Errc::parse, "slots must be an array");
                for (const json& s : slots) {
                    if (!s.is_number_integer())
                        throw Error(Errc::parse, "slots must be integers");
                    edge.slots.push_back(s.get<int>());
                }
                scheme.edges.push_back(std::move(edge));
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("scheme: ") + e.what());
    }
    return scheme;
}

DiffusionScheme load_scheme(const std::string& path) { return parse_scheme(slurp(path)); }

std::string scheme_to_json(const DiffusionScheme& scheme) {
    json j;
    j["slot_count"] = scheme.slot_count;
    j["edges"] = json::array();
    for (const Edge& e : scheme.edges) {
        json je;
        je["from"] = e.from.str();
        je["to"] = e.to.str();
        je["slots"] = e.slots;
        j["edges"].push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

void save_scheme(const DiffusionScheme& scheme, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(Errc::usage, "cannot open " + path + " for writing");
    os << scheme_to_json(scheme);
}

}  // namespace seedplan
