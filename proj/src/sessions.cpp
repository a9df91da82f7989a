#include "hurstlab/sessions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hurstlab/error.hpp"
#include "hurstlab/parallel.hpp"

namespace hurstlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// RFC 4180-ish: comma separated, double quotes around fields, "" escapes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

bool parse_int(std::string_view s, int& out) {
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && end == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && end == s.data() + s.size() && !s.empty();
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[month - 1];
}

bool valid(const Timestamp& t) {
  return t.month >= 1 && t.month <= 12 && t.day >= 1 && t.day <= days_in_month(t.year, t.month) &&
         t.hour >= 0 && t.hour <= 23 && t.minute >= 0 && t.minute <= 59 && t.second >= 0.0 &&
         t.second < 61.0;
}

}  // namespace

std::optional<Timestamp> parse_iso_timestamp(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  Timestamp t;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_int(text.substr(0, 4), t.year) || !parse_int(text.substr(5, 2), t.month) ||
      !parse_int(text.substr(8, 2), t.day)) {
    return std::nullopt;
  }
  if (text.size() > 10) {
    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    const std::string_view clock = text.substr(11);
    if (clock.size() < 5 || clock[2] != ':') return std::nullopt;
    if (!parse_int(clock.substr(0, 2), t.hour) || !parse_int(clock.substr(3, 2), t.minute)) {
      return std::nullopt;
    }
    if (clock.size() > 5) {
      if (clock[5] != ':' || !parse_double(clock.substr(6), t.second)) return std::nullopt;
    }
  }
  if (!valid(t)) return std::nullopt;
  return t;
}

std::optional<Timestamp> parse_timestamp(std::string_view text, const std::string& format) {
  if (format.empty()) return parse_iso_timestamp(text);
  std::tm tm{};
  std::istringstream in{std::string(trim(text))};
  in >> std::get_time(&tm, format.c_str());
  if (in.fail()) return std::nullopt;
  in >> std::ws;
  if (!in.eof()) return std::nullopt;
  Timestamp t{tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
              static_cast<double>(tm.tm_sec)};
  if (!valid(t)) return std::nullopt;
  return t;
}

TickLoad load_ticks(std::istream& source, const ColumnSpec& spec) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw FormatError("tick CSV has no header row");
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw FormatError(fmt::format("tick CSV header lacks column '{}'", name));
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = column(spec.timestamp_column);
  const std::size_t px_col = column(spec.price_column);

  TickLoad load;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      load.rejections.push_back(
          {line_no, fmt::format("expected {} fields, found {}", header.size(), fields.size())});
      continue;
    }
    const auto ts = parse_timestamp(fields[ts_col], spec.timestamp_format);
    if (!ts) {
      load.rejections.push_back({line_no, fmt::format("bad timestamp '{}'", fields[ts_col])});
      continue;
    }
    double price = 0.0;
    if (!parse_double(fields[px_col], price) || !std::isfinite(price)) {
      load.rejections.push_back({line_no, fmt::format("bad price '{}'", fields[px_col])});
      continue;
    }
    if (!(price > 0.0)) {
      load.rejections.push_back({line_no, fmt::format("nonpositive price {}", price)});
      continue;
    }
    if (!load.ticks.empty() && *ts < load.ticks.back().timestamp) {
      throw OrderingError(
          fmt::format("tick CSV line {}: timestamp '{}' precedes the previous row", line_no,
                      fields[ts_col]),
          line_no);
    }
    load.ticks.push_back({*ts, price});
  }
  if (load.ticks.empty()) {
    throw EmptyInputError(fmt::format("tick CSV contains no valid rows ({} rejected)",
                                      load.rejections.size()));
  }
  return load;
}

Series to_returns(std::span<const TickRecord> ticks, ReturnMode mode) {
  if (ticks.size() < 2) {
    throw DomainError(fmt::format("returns need at least 2 prices, got {}", ticks.size()));
  }
  for (const TickRecord& t : ticks) {
    if (!(t.price > 0.0) || !std::isfinite(t.price)) {
      throw DomainError(fmt::format("returns need positive prices, got {}", t.price));
    }
  }
  Series out(ticks.size() - 1);
  for (std::size_t i = 1; i < ticks.size(); ++i) {
    const double ratio = ticks[i].price / ticks[i - 1].price;
    out[i - 1] = mode == ReturnMode::Log ? std::log(ratio) : ratio - 1.0;
  }
  return out;
}

SessionKey session_key(const Timestamp& ts, Granularity granularity) {
  if (granularity == Granularity::Day) {
    return {granularity, fmt::format("{:04}-{:02}-{:02}", ts.year, ts.month, ts.day)};
  }
  return {granularity, fmt::format("{:04}-{:02}", ts.year, ts.month)};
}

std::vector<Session> group_sessions(std::span<const TickRecord> ticks, Granularity granularity) {
  if (ticks.empty()) throw EmptyInputError("no ticks to group");
  std::vector<Session> sessions;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (i > 0 && ticks[i].timestamp < ticks[i - 1].timestamp) {
      throw OrderingError(fmt::format("tick {} precedes its predecessor", i), i);
    }
    SessionKey key = session_key(ticks[i].timestamp, granularity);
    if (sessions.empty() || sessions.back().key != key) {
      sessions.push_back({std::move(key), {}});
    }
    sessions.back().ticks.push_back(ticks[i]);
  }
  return sessions;
}

std::size_t default_min_obs(Granularity granularity) {
  return granularity == Granularity::Day ? 128 : 1024;
}

std::vector<SessionHurst> session_hurst_series(std::span<const TickRecord> ticks,
                                               const SessionOptions& options) {
  options.estimator_config.validate();
  const std::size_t min_obs = options.min_obs.value_or(default_min_obs(options.granularity));
  const std::vector<Session> sessions = group_sessions(ticks, options.granularity);
  std::vector<SessionHurst> rows(sessions.size());

  parallel_for(sessions.size(), options.threads, [&](std::size_t i) {
    const Session& s = sessions[i];
    SessionHurst& row = rows[i];
    row.key = s.key;
    row.method = options.method;
    row.n_obs = s.ticks.size() > 0 ? s.ticks.size() - 1 : 0;
    if (row.n_obs < min_obs) {
      row.skip_reason = fmt::format("{} returns < minimum {}", row.n_obs, min_obs);
      return;
    }
    try {
      const Series returns = to_returns(s.ticks, options.return_mode);
      row.estimate = estimate(returns, options.method, options.estimator_config);
    } catch (const Error& e) {
      row.skip_reason = e.what();
    }
  });

  if (std::none_of(rows.begin(), rows.end(), [](const SessionHurst& r) { return r.ok(); })) {
    throw EmptyResultError(
        fmt::format("no session could be estimated ({} sessions, all skipped)", rows.size()));
  }
  return rows;
}

void write_sessions_csv(std::ostream& out, const std::vector<SessionHurst>& rows) {
  out << "session,n_obs,method,q,hurst,r_squared,status\n";
  for (const SessionHurst& r : rows) {
    if (r.ok()) {
      fmt::print(out, "{},{},{},{},{:.6f},{:.6f},ok\n", r.key.label, r.n_obs,
                 method_name(r.method.method), r.method.q, r.estimate->hurst,
                 r.estimate->fit.r_squared);
    } else {
      fmt::print(out, "{},{},{},{},,,skipped\n", r.key.label, r.n_obs,
                 method_name(r.method.method), r.method.q);
    }
  }
}

}  // namespace hurstlab
