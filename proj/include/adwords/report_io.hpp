#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adwords/audit.hpp"
#include "adwords/engines.hpp"
#include "adwords/harness.hpp"
#include "adwords/oracle.hpp"

namespace adwords {

// Insertion-ordered so that every document has a fixed key order.
using Json = nlohmann::ordered_json;

// Text of a JSON document, two-space indented, with a trailing newline.
std::string dump(const Json& doc);

// --- run outcomes -----------------------------------------------------------

Json to_json(const RunOutcome& outcome, std::optional<std::uint64_t> seed = std::nullopt);
RunOutcome outcome_from_json(const Json& doc);

Json to_json(const OfflineOptimum& opt);
OfflineOptimum optimum_from_json(const Json& doc);

// --- ranks file: a JSON array of per-bidder w values ----------------------

std::string ranks_to_json_text(const RankAssignment& ranks);
// Throws ParseError on malformed input, std::invalid_argument on a rank
// outside [0, 1].
RankAssignment ranks_from_json_text(const std::string& text);
RankAssignment read_ranks(const std::filesystem::path& path);

// --- audit ------------------------------------------------------------------

Json to_json(const AuditReport& report);
// One row per violation: seed, query, bidder, ebid, beta, surpassing_bid,
// surpassing_bidder.
std::string audit_csv(const std::vector<AuditReport>& reports);

// --- harness ----------------------------------------------------------------

Json to_json(const RatioEstimate& estimate);
RatioEstimate ratio_from_json(const Json& doc);
std::string ratio_csv(const std::vector<RatioEstimate>& rows);

Json to_json(const ContributionEstimate& estimate);
std::string contribution_csv(const std::vector<ContributionEstimate>& rows, std::uint64_t seed);

Json to_json(const FakeMoneyReport& report);

Json to_json(const SweepRow& row);
std::string sweep_csv(const std::vector<SweepRow>& rows, std::uint64_t seed);

// --- CSV reading ------------------------------------------------------------

struct CsvTable {
  std::optional<std::uint64_t> seed;  // from a leading "# seed=" line
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
};

// Comma-separated values without quoting (none of the tables emit commas in
// fields).
CsvTable parse_csv(const std::string& text);

}  // namespace adwords
