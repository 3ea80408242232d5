#pragma once

// JSON views of solver and diagnostic reports.

#include <json.hpp>

#include "hcma/hcma_field.hpp"
#include "hcma/regularity.hpp"

namespace hcma {

using json = nlohmann::ordered_json;

/// Doubles that are not finite become null.
json number(double v);

json to_json(const LinearFit& f);
json to_json(const LinearReport& r);
json to_json(const SolveReport& r);
json to_json(const SmallnessReport& r);
json to_json(const GaugeReport& r);
json to_json(const OrderStudy& s);
json to_json(const DerivativeStudy& s);
json to_json(const MaStudy& s);
json to_json(const EnvelopeReport& r);
json to_json(const PshReport& r);
json to_json(const ConvexityReport& r);
json to_json(const Table& t);
json to_json(const LogGrowthReport& r);
json to_json(const OffAxisReport& r);
json to_json(const BmoUniformityReport& r);
json to_json(const CzoReport& r);
json to_json(const BlowupReport& r);
json to_json(const JohnNirenbergReport& r);

}  // namespace hcma
