#pragma once

#include <json.hpp>

#include "cltb/bound_value.hpp"
#include "cltb/function_spec.hpp"
#include "cltb/univariate.hpp"
#include "cltb/vector_sequence.hpp"
#include "cltb/verify.hpp"

namespace cltb {

// nlohmann's ordered document keeps key order stable, which the CLI's
// byte-identical-output contract relies on.
using json = nlohmann::ordered_json;

json to_json(const UnivariateSpec& spec);
UnivariateSpec univariate_from_json(const json& j);

json to_json(const VectorSequenceSpec& seq);
VectorSequenceSpec sequence_from_json(const json& j);

// Blackbox functions are programmatic only and cannot round-trip.
json to_json(const FunctionSpec& f);
FunctionSpec function_from_json(const json& j);

json to_json(const FourierAtomicSpec& f);
FourierAtomicSpec fourier_from_json(const json& j);

json to_json(const BoundValue& bound);
BoundValue bound_from_json(const json& j);

json to_json(const VerdictReport& report);

// "instance_id,lhs,c0,c1,ratio,verdict" with %.17g number formatting.
std::string to_csv_row(const VerdictReport& report,
                       const std::string& instance_id);

}  // namespace cltb
