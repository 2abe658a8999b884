#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/covariance.hpp"
#include "cvqkd/errors.hpp"

namespace cvqkd {

/// One heterodyne round: Alice's modulation pair and Bob's pair of outcomes,
/// all signal-referred in shot-noise units.
struct HeterodyneSample {
  double m_x = 0.0;
  double m_p = 0.0;
  double b_x = 0.0;
  double b_p = 0.0;
};

/// One homodyne round: Alice's modulation pair, Bob's measured basis and his
/// outcome in that basis.
struct HomodyneSample {
  double m_x = 0.0;
  double m_p = 0.0;
  Quadrature basis = Quadrature::x;
  double b = 0.0;
};

namespace detail {

/// Compensated accumulator of the paired second moments of one quadrature.
/// Mergeable, so chunked (parallel) accumulation gives the same result as a
/// sequential pass to well below the 1e-12 contract.
class MomentAccumulator {
 public:
  void add(double m, double b) {
    ++count_;
    add_compensated(sum_m_, comp_m_, m);
    add_compensated(sum_b_, comp_b_, b);
    add_compensated(sum_mm_, comp_mm_, m * m);
    add_compensated(sum_bb_, comp_bb_, b * b);
    add_compensated(sum_mb_, comp_mb_, m * b);
  }

  void merge(const MomentAccumulator& other) {
    count_ += other.count_;
    add_compensated(sum_m_, comp_m_, other.sum_m_ + other.comp_m_);
    add_compensated(sum_b_, comp_b_, other.sum_b_ + other.comp_b_);
    add_compensated(sum_mm_, comp_mm_, other.sum_mm_ + other.comp_mm_);
    add_compensated(sum_bb_, comp_bb_, other.sum_bb_ + other.comp_bb_);
    add_compensated(sum_mb_, comp_mb_, other.sum_mb_ + other.comp_mb_);
  }

  std::size_t count() const { return count_; }

  /// Unbiased (1/(N-1)) sample variance of the modulation values.
  double var_m() const { return variance(sum_m_ + comp_m_, sum_mm_ + comp_mm_); }
  double var_b() const { return variance(sum_b_ + comp_b_, sum_bb_ + comp_bb_); }

  double cov_mb() const {
    const double n = static_cast<double>(count_);
    const double sm = sum_m_ + comp_m_;
    const double sb = sum_b_ + comp_b_;
    return ((sum_mb_ + comp_mb_) - sm * sb / n) / (n - 1.0);
  }

 private:
  static void add_compensated(double& sum, double& comp, double value) {
    const double y = value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  double variance(double s, double ss) const {
    const double n = static_cast<double>(count_);
    return (ss - s * s / n) / (n - 1.0);
  }

  std::size_t count_ = 0;
  double sum_m_ = 0.0, comp_m_ = 0.0;
  double sum_b_ = 0.0, comp_b_ = 0.0;
  double sum_mm_ = 0.0, comp_mm_ = 0.0;
  double sum_bb_ = 0.0, comp_bb_ = 0.0;
  double sum_mb_ = 0.0, comp_mb_ = 0.0;
};

inline void require_usable(const MomentAccumulator& acc, const char* quadrature) {
  if (acc.count() < 2)
    throw InsufficientData(std::string("fewer than 2 usable records in the ") + quadrature +
                           " quadrature");
  if (!(acc.var_m() > 0.0))
    throw InsufficientData(std::string("degenerate samples: modulation variance in the ") +
                           quadrature + " quadrature is zero");
}

}  // namespace detail

/// Sample moments of heterodyne records, unbiased normalization.
inline PostChannelStats estimate_stats(std::span<const HeterodyneSample> samples) {
  detail::MomentAccumulator acc_x, acc_p;
  for (const auto& s : samples) {
    acc_x.add(s.m_x, s.b_x);
    acc_p.add(s.m_p, s.b_p);
  }
  detail::require_usable(acc_x, "x");
  detail::require_usable(acc_p, "p");
  PostChannelStats post;
  post.V_M_x = acc_x.var_m();
  post.V_M_p = acc_p.var_m();
  post.V_Bp_x = acc_x.var_b();
  post.V_Bp_p = acc_p.var_b();
  post.C_MBp_x = acc_x.cov_mb();
  post.C_MBp_p = acc_p.cov_mb();
  return post;
}

/// Sample moments of homodyne records; each record contributes only to its
/// tagged quadrature. Basis counts need not be balanced.
inline PostChannelStats estimate_stats(std::span<const HomodyneSample> samples) {
  detail::MomentAccumulator acc_x, acc_p;
  for (const auto& s : samples) {
    if (s.basis == Quadrature::x)
      acc_x.add(s.m_x, s.b);
    else
      acc_p.add(s.m_p, s.b);
  }
  detail::require_usable(acc_x, "x");
  detail::require_usable(acc_p, "p");
  PostChannelStats post;
  post.V_M_x = acc_x.var_m();
  post.V_M_p = acc_p.var_m();
  post.V_Bp_x = acc_x.var_b();
  post.V_Bp_p = acc_p.var_b();
  post.C_MBp_x = acc_x.cov_mb();
  post.C_MBp_p = acc_p.cov_mb();
  return post;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

inline double parse_finite(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw MalformedInput("line " + std::to_string(line_no) + ": cannot parse numeric value '" +
                         std::string(token) + "'");
  if (!std::isfinite(value))
    throw MalformedInput("line " + std::to_string(line_no) + ": non-finite value '" +
                         std::string(token) + "'");
  return value;
}

inline void require_header(std::istream& in, std::string_view expected, const char* protocol) {
  std::string line;
  if (!std::getline(in, line))
    throw MalformedInput("empty sample file, expected header '" + std::string(expected) + "'");
  if (trim(line) != expected)
    throw MalformedInput(std::string("line 1: ") + protocol + " samples need header '" +
                         std::string(expected) + "', got '" + std::string(trim(line)) + "'");
}

}  // namespace detail

/// Reads heterodyne samples: UTF-8 CSV with header `m_x,m_p,b_x,b_p`.
inline std::vector<HeterodyneSample> read_heterodyne_samples(std::istream& in) {
  detail::require_header(in, "m_x,m_p,b_x,b_p", "heterodyne");
  std::vector<HeterodyneSample> samples;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 4)
      throw MalformedInput("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                           std::to_string(fields.size()));
    samples.push_back({detail::parse_finite(fields[0], line_no),
                       detail::parse_finite(fields[1], line_no),
                       detail::parse_finite(fields[2], line_no),
                       detail::parse_finite(fields[3], line_no)});
  }
  return samples;
}

/// Reads homodyne samples: UTF-8 CSV with header `m_x,m_p,basis,b`,
/// basis in {x,p}.
inline std::vector<HomodyneSample> read_homodyne_samples(std::istream& in) {
  detail::require_header(in, "m_x,m_p,basis,b", "homodyne");
  std::vector<HomodyneSample> samples;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 4)
      throw MalformedInput("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                           std::to_string(fields.size()));
    HomodyneSample s;
    s.m_x = detail::parse_finite(fields[0], line_no);
    s.m_p = detail::parse_finite(fields[1], line_no);
    if (fields[2] == "x")
      s.basis = Quadrature::x;
    else if (fields[2] == "p")
      s.basis = Quadrature::p;
    else
      throw MalformedInput("line " + std::to_string(line_no) + ": basis must be 'x' or 'p', got '" +
                           std::string(fields[2]) + "'");
    s.b = detail::parse_finite(fields[3], line_no);
    samples.push_back(s);
  }
  return samples;
}

}  // namespace cvqkd
