#include "hlrp/holdings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "hlrp/error.hpp"

namespace hlrp {

std::size_t IdIndex::intern(const std::string& id) {
  auto [it, inserted] = lookup_.try_emplace(id, ids_.size());
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::optional<std::size_t> IdIndex::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

const QuarterSnapshot& HoldingsData::quarter(std::string_view label) const {
  for (const auto& q : quarters)
    if (q.quarter == label) return q;
  throw ParseError("no positions for quarter '" + std::string(label) + "'");
}

std::size_t HoldingsData::total_positions() const {
  std::size_t n = 0;
  for (const auto& q : quarters) n += q.positions.size();
  return n;
}

int quarter_ordinal(std::string_view label) {
  if (label.size() != 6 || label[4] != 'Q' || label[5] < '1' || label[5] > '4') {
    throw ParseError("malformed quarter label '" + std::string(label) + "' (expected YYYYQn)");
  }
  int year = 0;
  auto [ptr, ec] = std::from_chars(label.data(), label.data() + 4, year);
  if (ec != std::errc() || ptr != label.data() + 4) {
    throw ParseError("malformed quarter label '" + std::string(label) + "' (expected YYYYQn)");
  }
  return year * 4 + (label[5] - '1');
}

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty() || was_quoted) throw ParseError("stray quote inside field");
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      if (was_quoted) throw ParseError("characters after closing quote");
      field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

namespace {

// Reads one logical record, joining physical lines while a quote is open.
bool read_record(std::istream& in, std::string& record, std::size_t& line_no) {
  record.clear();
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (any) record += '\n';
    record += line;
    any = true;
    std::size_t quotes = 0;
    for (char c : record) quotes += c == '"';
    if (quotes % 2 == 0) return true;
  }
  return any;
}

double parse_market_value(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError("market_value '" + text + "' is not a decimal literal");
  }
  if (v < 0.0) throw ParseError("negative market_value " + text);
  return v;
}

}  // namespace

void parse_holdings(std::istream& in, HoldingsData& data) {
  std::string record;
  std::size_t line_no = 0;
  if (!read_record(in, record, line_no)) throw ParseError("line 1: missing header");
  if (record.size() >= 3 && record.compare(0, 3, "\xEF\xBB\xBF") == 0) record.erase(0, 3);
  if (record != kHoldingsHeader) {
    throw ParseError("line 1: expected header '" + std::string(kHoldingsHeader) + "'");
  }

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> seen;
  for (std::size_t qi = 0; qi < data.quarters.size(); ++qi) {
    const auto& q = data.quarters[qi];
    for (std::size_t pi = 0; pi < q.positions.size(); ++pi)
      seen[{qi, q.positions[pi].holder, q.positions[pi].fund}] = pi;
  }

  while (true) {
    const std::size_t record_line = line_no + 1;
    if (!read_record(in, record, line_no)) break;
    if (record.empty()) continue;
    try {
      auto f = split_csv_record(record);
      if (f.size() != 7) {
        throw ParseError("expected 7 fields, found " + std::to_string(f.size()));
      }
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].empty()) throw ParseError("empty field " + std::to_string(i + 1));
      }
      quarter_ordinal(f[0]);
      Position p;
      p.quarter = f[0];
      p.holder_id = f[1];
      p.fund_id = f[2];
      p.market_value = parse_market_value(f[3]);
      p.category = f[4];
      p.strategy = f[5];
      p.issuer = f[6];
      p.holder = data.holders.intern(p.holder_id);
      p.fund = data.funds.intern(p.fund_id);

      std::size_t qi = 0;
      while (qi < data.quarters.size() && data.quarters[qi].quarter != p.quarter) ++qi;
      if (qi == data.quarters.size()) data.quarters.push_back(QuarterSnapshot{p.quarter, {}, 0, 0});
      auto& positions = data.quarters[qi].positions;
      auto [it, inserted] = seen.try_emplace({qi, p.holder, p.fund}, positions.size());
      if (inserted) {
        positions.push_back(std::move(p));
      } else {
        positions[it->second].market_value += p.market_value;
      }
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(record_line) + ": " + e.what());
    }
  }

  for (auto& q : data.quarters) {
    q.num_holders = data.holders.size();
    q.num_funds = data.funds.size();
  }
}

HoldingsData parse_holdings(std::istream& in) {
  HoldingsData data;
  parse_holdings(in, data);
  return data;
}

HoldingsData load_holdings(const std::vector<std::string>& paths) {
  HoldingsData data;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open holdings file '" + path + "'");
    try {
      parse_holdings(in, data);
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  return data;
}

namespace {

void write_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

void write_holdings_csv(std::ostream& out, const std::vector<Position>& positions) {
  out << kHoldingsHeader << '\n';
  char buf[64];
  for (const auto& p : positions) {
    write_field(out, p.quarter);
    out << ',';
    write_field(out, p.holder_id);
    out << ',';
    write_field(out, p.fund_id);
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.market_value);
    out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << ',';
    write_field(out, p.category);
    out << ',';
    write_field(out, p.strategy);
    out << ',';
    write_field(out, p.issuer);
    out << '\n';
  }
}

}  // namespace hlrp
