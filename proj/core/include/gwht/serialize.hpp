#pragma once

#include <nlohmann/json.hpp>

#include "gwht/exponents.hpp"
#include "gwht/osrb.hpp"
#include "gwht/prob.hpp"
#include "gwht/protocol.hpp"
#include "gwht/types.hpp"

namespace gwht {

using json = nlohmann::json;

// Non-finite values are written as the strings "inf", "-inf", "nan".
json number_to_json(double v);
double number_from_json(const json& j);

json to_json(const JointPmf& p);
JointPmf joint_pmf_from_json(const json& j);
json to_json(const CondPmf& c);
CondPmf cond_pmf_from_json(const json& j);
json to_json(const NType& t);
NType ntype_from_json(const json& j);
json to_json(const JointNType& t);
json to_json(const Sequence& s);
Sequence sequence_from_json(const json& j);

json to_json(const RateVector& r);
RateVector rates_from_json(const json& j);
json to_json(const ExponentValue& v);
json to_json(const ExponentReport& r);
json to_json(const RegionReport& r);
json to_json(const ErrorReport& r);
json to_json(const Transcript& t);
json to_json(const CorrectionTerms& c);

}  // namespace gwht
