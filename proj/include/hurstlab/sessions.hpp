#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hurstlab/estimators.hpp"

namespace hurstlab {

struct Timestamp {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  double second = 0.0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Accepts YYYY-MM-DD, optionally followed by 'T' or ' ' and HH:MM[:SS[.fff]]
/// and an optional trailing 'Z'. Returns nullopt on anything else.
std::optional<Timestamp> parse_iso_timestamp(std::string_view text);

/// strptime-style parse (std::get_time) with the given format.
std::optional<Timestamp> parse_timestamp(std::string_view text, const std::string& format);

struct TickRecord {
  Timestamp timestamp;
  double price = 0.0;
};

struct ColumnSpec {
  std::string timestamp_column = "timestamp";
  std::string price_column = "price";
  std::string timestamp_format;  // empty = ISO-8601
};

struct RowRejection {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct TickLoad {
  std::vector<TickRecord> ticks;
  std::vector<RowRejection> rejections;
};

/// Parses a headed CSV. Unparsable rows are collected in `rejections`;
/// a missing column raises FormatError, a backwards timestamp OrderingError
/// (naming the line) and an input without valid rows EmptyInputError.
TickLoad load_ticks(std::istream& source, const ColumnSpec& spec);

enum class ReturnMode { Log, Simple };

Series to_returns(std::span<const TickRecord> ticks, ReturnMode mode);

enum class Granularity { Day, Month };

struct SessionKey {
  Granularity granularity = Granularity::Day;
  std::string label;  // YYYY-MM-DD or YYYY-MM

  friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

SessionKey session_key(const Timestamp& ts, Granularity granularity);

struct Session {
  SessionKey key;
  std::vector<TickRecord> ticks;
};

/// Contiguous partition by calendar day or month, in chronological order.
std::vector<Session> group_sessions(std::span<const TickRecord> ticks,
                                    Granularity granularity);

struct SessionHurst {
  SessionKey key;
  MethodSpec method;
  std::size_t n_obs = 0;  // returns inside the session
  std::optional<HurstEstimate> estimate;
  std::string skip_reason;  // set when estimate is empty

  bool ok() const { return estimate.has_value(); }
};

/// 128 returns per day, 1024 per month.
std::size_t default_min_obs(Granularity granularity);

struct SessionOptions {
  Granularity granularity = Granularity::Day;
  MethodSpec method{Method::GHE, 2.0};
  ReturnMode return_mode = ReturnMode::Log;
  EstimatorConfig estimator_config{};
  std::optional<std::size_t> min_obs;  // default_min_obs(granularity) when unset
  unsigned threads = 1;
};

/// One entry per session, chronological. Sessions below min_obs or on which
/// the estimator fails are kept with a skip reason. Returns never span two
/// sessions. Throws EmptyResultError if no session could be estimated.
std::vector<SessionHurst> session_hurst_series(std::span<const TickRecord> ticks,
                                               const SessionOptions& options);

/// CSV with header session,n_obs,method,q,hurst,r_squared,status.
void write_sessions_csv(std::ostream& out, const std::vector<SessionHurst>& rows);

}  // namespace hurstlab
