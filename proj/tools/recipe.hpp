#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "whgrav/contour.hpp"
#include "whgrav/verify.hpp"

namespace whgrav::cli {

/// Contours keyed by descriptor, so equal descriptors share one object and
/// solutions built from them can be multiplied.
class ContourRegistry {
 public:
  ContourPtr get(const nlohmann::json& descriptor);

 private:
  std::map<std::string, ContourPtr> contours_;
};

/// A recipe is a JSON tree of operations whose leaves are factorizations:
///   {"op":"solve","monodromy":{...},"contour":{...},"backend":"auto"}
///   {"op":"deform","base":R,"deformation":{...}}
///   {"op":"compose","left":R,"right":R}
///   {"op":"invert","base":R}
SolutionFamily family_from_recipe(const nlohmann::json& recipe, ContourRegistry& registry);

/// The document written by factorize, deform, compose and invert.
nlohmann::json solution_document(const nlohmann::json& recipe, const Grid& grid,
                                 const SolutionFamily& family);

}  // namespace whgrav::cli
