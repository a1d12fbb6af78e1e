#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lensbell/extension.hpp"
#include "lensbell/gluing.hpp"
#include "lensbell/splitting.hpp"

// JSON and CSV forms of the library types. Documents are strings so the JSON
// library stays private to the core.
namespace lensbell::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_json(const ConvexBody& body);
ConvexBody body_from_json(const std::string& doc);

std::string to_json(const LensDomain& lens);
LensDomain lens_from_json(const std::string& doc);

std::string to_json(const BoundaryFunction& f);
BoundaryFunction function_from_json(const std::string& doc);

std::string to_json(const StepFunction& phi);
StepFunction step_from_json(const std::string& doc);

std::string to_json(const SimpleMartingale& m);
SimpleMartingale martingale_from_json(const std::string& doc);

std::string to_json(const std::vector<TraceEntry>& trace);
std::string to_json(const MembershipReport& r);
std::string to_json(const MartingaleReport& r);
std::string to_json(const RealizationReport& r);
std::string to_json(const ConcavityReport& r);
std::string to_json(const std::vector<ConditionReport>& r);
std::string to_json(const ExtensionResult& r, const std::optional<RegressionReport>& regression = std::nullopt);

// x,y,value rows over the mask; unreached nodes print UNREACHED.
std::string field_csv(const ScalarField& field);
std::string field_meta_json(const ScalarField& field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace lensbell::io
