#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hlrp {

/// Dense index assignment for string ids, in first-appearance order.
class IdIndex {
 public:
  std::size_t intern(const std::string& id);
  std::optional<std::size_t> find(std::string_view id) const;
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct Position {
  std::string quarter;
  std::string holder_id;
  std::string fund_id;
  double market_value = 0.0;
  std::string category;
  std::string strategy;
  std::string issuer;
  std::size_t holder = 0;
  std::size_t fund = 0;
};

/// One quarter of positions; at most one Position per (holder, fund).
/// num_holders / num_funds span the id space shared by every parsed quarter.
struct QuarterSnapshot {
  std::string quarter;
  std::vector<Position> positions;
  std::size_t num_holders = 0;
  std::size_t num_funds = 0;
};

struct HoldingsData {
  IdIndex holders;
  IdIndex funds;
  std::vector<QuarterSnapshot> quarters;

  const QuarterSnapshot& quarter(std::string_view label) const;
  std::size_t total_positions() const;
};

inline constexpr std::string_view kHoldingsHeader =
    "quarter,holder_id,fund_id,market_value,category,strategy,issuer";

/// Parses one holdings CSV stream into `data`, extending its id maps and
/// snapshots. Duplicate (quarter, holder, fund) rows are summed.
void parse_holdings(std::istream& in, HoldingsData& data);
HoldingsData parse_holdings(std::istream& in);
HoldingsData load_holdings(const std::vector<std::string>& paths);

void write_holdings_csv(std::ostream& out, const std::vector<Position>& positions);

/// "YYYYQn" -> year * 4 + (n - 1). Throws ParseError on malformed labels.
int quarter_ordinal(std::string_view label);

/// RFC 4180 style field splitting of a single record.
std::vector<std::string> split_csv_record(std::string_view line);

}  // namespace hlrp
