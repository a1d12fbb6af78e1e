#pragma once

#include <json.hpp>

#include "lensbell/io.hpp"

namespace lensbell::io::detail {

using json = nlohmann::json;

json point(const Point& p);
Point point(const json& j);

json body(const ConvexBody& b);
ConvexBody body(const json& j);
json lens(const LensDomain& l);
LensDomain lens(const json& j);
json function(const BoundaryFunction& f);
BoundaryFunction function(const json& j);
json step(const StepFunction& phi);
StepFunction step(const json& j);
json martingale(const SimpleMartingale& m);
SimpleMartingale martingale(const json& j);

json parse(const std::string& doc);
std::string dump(const json& j);

}  // namespace lensbell::io::detail
