#pragma once

#include <string>

#include <json.hpp>

#include "kms/classify.hpp"
#include "kms/conformal.hpp"
#include "kms/eigensolver.hpp"
#include "kms/lattice.hpp"
#include "kms/periods.hpp"
#include "kms/spectral.hpp"
#include "kms/structure.hpp"

namespace kms {

// All reports use key-order-preserving JSON so identical computations emit
// byte-identical documents.
using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "kms-graph-lab/1";

// {"schema": ..., "command": ...} skeleton every CLI report starts from.
Json report_envelope(const std::string& command);

Json to_json(const StructureReport& r);
Json to_json(const Beta0Result& r);
Json to_json(const RecurrenceResult& r);
Json to_json(const PeriodResult& r);
Json to_json(const DPrimeWitness& w);
Json to_json(const DPrimeResult& r);
Json to_json(const FactorResult& r);
Json to_json(const StateCheck& r);
Json to_json(const ResidualReport& r);
Json to_json(const EigenSolution& s);
Json to_json(const AdditivityReport& r);
Json to_json(const DualityReport& r);
Json to_json(const MgfMinimum& m);
Json to_json(const RayStructure& r);
Json to_json(const StochasticResult& r);
Json to_json(const BetaSample& s);
Json to_json(const InvariantReport& r);
Json to_json(const GoldenRow& r);
Json to_json(const GoldenReport& r);

// Finite numbers pass through; infinities become the strings "inf"/"-inf"
// so reports stay valid JSON.
Json json_number(double x);

}  // namespace kms
