#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pcone/ergodic.hpp"
#include "pcone/exponent.hpp"
#include "pcone/validation.hpp"

namespace pcone {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

Json profile_json(const Profile& prof);
Json lambda_point_json(const LambdaPoint& pt);
Json exponent_json(const ExponentResult& r, bool with_profile);
Json ergodic_levels_json(const ErgodicResult& r);
Json report_json(const ConsistencyReport& rep);
Json criterion_json(const CriterionResult& c);

std::string profile_csv(const Profile& prof);
std::string lambda_csv(const std::vector<LambdaPoint>& pts);

}  // namespace pcone
