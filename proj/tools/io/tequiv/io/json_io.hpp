#pragma once

// JSON encodings of the library types and the report envelope shared by the
// command-line tool and the acceptance suite.
//
// Integers are JSON numbers when they fit in 64 bits and decimal strings
// otherwise; group elements and characters are bit strings, b_1 first.

#include <string>
#include <vector>

#include "json.hpp"
#include "tequiv/construction.hpp"
#include "tequiv/cover_data.hpp"
#include "tequiv/lens_topology.hpp"
#include "tequiv/quotient_sings.hpp"
#include "tequiv/rdp_actions.hpp"

namespace tequiv::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const Int& v);
Int int_from_json(const json& j);

json to_json(const DivClass& c);
/// Accepts {"r", "s", "a"}; the a-list must have n entries.
DivClass class_from_json(const json& j, std::size_t n);

json to_json(const BranchMap& d);
json to_json(const BuildingData& data);

/// Reads {"rank", "n", "D": [{"sigma", "class"}], "D_uniform"?, "basis"?, "L"?}.
/// Without "L" the data are solved on the basis (standard when absent).
BuildingData building_data_from_json(const json& j);

json to_json(const CoverReport& r);
json to_json(const VanishingReport& r);
json to_json(const InvariantReport& r);
json to_json(const RamificationProfile& r);
json to_json(const AmpleCheck& r);
json to_json(const PrescriptionCheck& r);
json to_json(const Germ& g);
json to_json(const HJChain& c);
json to_json(const EmbedResult& r);
json to_json(const Verdict& v);
json to_json(const ActionRecord& r);
json to_json(const ConsistencyReport& r);
json to_json(const FactorModuli& m);

/// The certificate without anything run-dependent: equal inputs give equal text.
json to_json(const Certificate& c);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// {schema_version, command, input_hash, payload, timing_ms}
json make_report(const std::vector<std::string>& command, const std::string& input_hash, json payload,
                 double timing_ms);

}  // namespace tequiv::io
