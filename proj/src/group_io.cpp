#include "irswb/group_io.hpp"

#include <fstream>

#include "irswb/errors.hpp"

namespace irswb {

GeneratedGroup group_from_json(const nlohmann::json& j, std::size_t cap) {
  try {
    const auto degree = j.at("degree").get<std::size_t>();
    if (degree == 0) throw ParseError("degree must be positive");
    std::vector<Permutation> gens;
    for (const auto& g : j.at("generators")) {
      auto images = g.get<std::vector<Point>>();
      if (images.size() != degree) throw ParseError("generator length differs from degree");
      gens.emplace_back(std::move(images));
    }
    return GeneratedGroup(degree, std::move(gens), cap);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

nlohmann::json group_to_json(const GeneratedGroup& G) {
  nlohmann::json j;
  j["degree"] = G.degree();
  j["generators"] = elements_to_json(G.generators());
  return j;
}

nlohmann::json elements_to_json(const std::vector<Permutation>& elements) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : elements) arr.push_back(p.images());
  return arr;
}

GeneratedGroup read_group_file(const std::string& path, std::size_t cap) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return group_from_json(j, cap);
}

}  // namespace irswb
