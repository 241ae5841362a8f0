#pragma once

#include <string>

#include "gradlab/config.hpp"
#include "gradlab/drift.hpp"
#include "gradlab/inequality.hpp"
#include "gradlab/montecarlo.hpp"

namespace gradlab {

// JSON blocks for the run report.  Numbers pass through nlohmann untouched,
// so the serialized report is a pure function of the computed values.
ordered_json check_to_json(const InequalityReport& rep);
ordered_json drift_to_json(const DriftReport& rep, double h_relerr);
ordered_json weak_error_to_json(const WeakErrorReport& rep);
ordered_json supermartingale_to_json(const SupermartingaleReport& rep);

void write_text_file(const std::string& path, const std::string& content);

// CSV extracts.  Check rows cover masked nodes only; drift rows cover every
// valid node with a masked flag so the sub-floor transient stays inspectable.
std::string check_csv(const InequalityReport& rep);
std::string drift_csv(const DriftReport& rep);
std::string mc_csv(const SupermartingaleReport& rep);

}  // namespace gradlab
