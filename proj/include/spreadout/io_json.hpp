#pragma once

// JSON export/import for every result type the CLI can emit.  Everything goes
// through nlohmann::ordered_json so field order (and hence the byte output) is
// deterministic, and every emitted object re-parses into the emitting type.

#include <json.hpp>

#include <string>

#include "spreadout/continuum.hpp"
#include "spreadout/diagrams.hpp"
#include "spreadout/returns.hpp"
#include "spreadout/simulate.hpp"
#include "spreadout/sums.hpp"
#include "spreadout/verify.hpp"

namespace spreadout {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

void to_json(Json& j, const TailEstimate& t);
void from_json(const Json& j, TailEstimate& t);

void to_json(Json& j, const ReturnSeries& s);
void from_json(const Json& j, ReturnSeries& s);

void to_json(Json& j, const ContinuumReturns& c);
void from_json(const Json& j, ContinuumReturns& c);

void to_json(Json& j, const LoopSums& s);
void from_json(const Json& j, LoopSums& s);

void to_json(Json& j, const Prediction& p);
void from_json(const Json& j, Prediction& p);

void to_json(Json& j, const CompareRow& r);
void from_json(const Json& j, CompareRow& r);

void to_json(Json& j, const LoopEnumeration& e);
void from_json(const Json& j, LoopEnumeration& e);

void to_json(Json& j, const SawBound& b);
void from_json(const Json& j, SawBound& b);

void to_json(Json& j, const SimEstimate& e);
void from_json(const Json& j, SimEstimate& e);

void to_json(Json& j, const PcEstimate& e);
void from_json(const Json& j, PcEstimate& e);

void to_json(Json& j, const CriterionResult& r);
void from_json(const Json& j, CriterionResult& r);

// One row of the contact-process discretization limit f(eps) -> S_all.
struct CpLimitRow {
    double eps = 0.0;
    double f = 0.0;
    double s_all = 0.0;
    double gap = 0.0;  // |f - s_all|
};
void to_json(Json& j, const CpLimitRow& r);
void from_json(const Json& j, CpLimitRow& r);

// {"schema": 1, "kind": ..., "data": ..., "meta": {...}}; meta (tool, version,
// timestamp) is dropped when with_meta is false so reruns are byte-identical.
Json envelope(const std::string& kind, Json data, bool with_meta);

// Both throw IoError with the path in the message.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace spreadout
