#pragma once

#include "seedplan/model.hpp"

#include <string>

namespace seedplan {

struct Scenario {
    StreamParams params;
    Population pop;
};

/// Scenario file shape:
/// {"stream": {"r", "a", "b", "a_r", "b_r"},      all optional, defaults apply
///  "servers": {"n_c"},                            optional, default 1
///  "leechers": {"count"},                          required
///  "seeders": [{"upload", "fanout", "count"}]}     fanout/count optional
/// A seeder entry with "count": n expands to n identical seeders.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

/// Scheme file shape:
/// {"slot_count": K, "edges": [{"from": id, "to": id, "slots": [ints]}]}
/// with node ids "server", "S<i>", "L<i>" (0-based).
DiffusionScheme load_scheme(const std::string& path);
DiffusionScheme parse_scheme(const std::string& json_text);
std::string scheme_to_json(const DiffusionScheme& scheme);
void save_scheme(const DiffusionScheme& scheme, const std::string& path);

}  // namespace seedplan
