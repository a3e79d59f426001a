#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sparsecov/estimators.hpp"
#include "sparsecov/simulation.hpp"
#include "sparsecov/tuning.hpp"

namespace sparsecov {

/// { "target", "p", "lambda", "penalty", "estimate" (row-major), "support_offdiag",
///   "objective_trace", "converged", ... } plus "companion", "T" and "D" when present.
nlohmann::json result_to_json(const EstimationResult& result, const Penalty& pen);

/// lambda,bic,support_size,objective,converged
void write_selection_csv(std::ostream& out, const Selection& selection);

inline constexpr const char* kRateCsvHeader =
    "n,p,s,mean_sq_frobenius,sd_sq_frobenius,mean_sq_operator,sd_sq_operator,"
    "true_zero_rate,true_nonzero_rate,mean_lambda,completed,failures";

void write_rate_csv(std::ostream& out, const RateReport& report);
nlohmann::json rate_summary_json(const RateReport& report, const RateExperiment& exp);

}  // namespace sparsecov
