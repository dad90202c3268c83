#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "irswb/perm.hpp"

namespace irswb {

// {"degree": n, "generators": [[images...], ...]}
GeneratedGroup group_from_json(const nlohmann::json& j, std::size_t cap = kDefaultCap);
nlohmann::json group_to_json(const GeneratedGroup& G);
nlohmann::json elements_to_json(const std::vector<Permutation>& elements);

GeneratedGroup read_group_file(const std::string& path, std::size_t cap = kDefaultCap);

}  // namespace irswb
