#include "recipe.hpp"

#include <optional>
#include <vector>

#include "whgrav/error.hpp"
#include "whgrav/factorize.hpp"
#include "whgrav/monodromy.hpp"
#include "whgrav/parallel.hpp"

namespace whgrav::cli {

ContourPtr ContourRegistry::get(const nlohmann::json& descriptor) {
  const auto key = descriptor.dump();
  auto it = contours_.find(key);
  if (it != contours_.end()) return it->second;
  auto c = Contour::from_json(descriptor);
  contours_.emplace(key, c);
  return c;
}

namespace {

const nlohmann::json& field(const nlohmann::json& r, const char* key) {
  if (!r.contains(key)) throw Error(ErrorKind::Parse, std::string("recipe: missing '") + key + "'");
  return r[key];
}

}  // namespace

SolutionFamily family_from_recipe(const nlohmann::json& recipe, ContourRegistry& registry) {
  if (!recipe.is_object() || !recipe.contains("op")) throw Error(ErrorKind::Parse, "recipe: missing 'op'");
  const auto op = recipe["op"].get<std::string>();
  if (op == "solve") {
    const auto mono = parse_monodromy(field(recipe, "monodromy"));
    const auto contour = registry.get(field(recipe, "contour"));
    const SolveOptions opts{backend_from_string(recipe.value("backend", std::string("auto")))};
    return [mono, contour, opts](const WeylPoint& p) { return canonical_solve(mono, p, contour, opts); };
  }
  if (op == "deform") {
    auto base = family_from_recipe(field(recipe, "base"), registry);
    const auto spec = DeformationSpec::from_json(field(recipe, "deformation"));
    return [base, spec](const WeylPoint& p) { return deform(base(p), spec); };
  }
  if (op == "compose") {
    auto left = family_from_recipe(field(recipe, "left"), registry);
    auto right = family_from_recipe(field(recipe, "right"), registry);
    return [left, right](const WeylPoint& p) { return multiply_solutions(left(p), right(p)); };
  }
  if (op == "invert") {
    auto base = family_from_recipe(field(recipe, "base"), registry);
    return [base](const WeylPoint& p) { return invert_solution(base(p)); };
  }
  throw Error(ErrorKind::Parse, "recipe: unknown op '" + op + "'");
}

nlohmann::json solution_document(const nlohmann::json& recipe, const Grid& grid,
                                 const SolutionFamily& family) {
  std::vector<std::optional<CanonicalSolution>> sols(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { sols[i] = family(grid.point(i)); });
  nlohmann::json doc{{"format", "whgrav.solution/1"},
                     {"grid", grid.to_json()},
                     {"recipe", recipe},
                     {"solutions", nlohmann::json::array()}};
  for (const auto& s : sols) doc["solutions"].push_back(to_json(*s));
  return doc;
}

}  // namespace whgrav::cli
