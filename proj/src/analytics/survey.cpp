#include "freetalky/analytics/survey.hpp"

#include "freetalky/text/tokenizer.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace freetalky::analytics {

void SurveyResponses::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int v : rows[r])
      if (v < 1 || v > 5) throw SurveyError("respondent " + std::to_string(r + 1) + ": answer outside 1..5");
}

std::vector<double> SurveyResponses::column(int question) const {
  if (question < 0 || question >= kQuestionCount) throw SurveyError("question index out of range");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(question)]);
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(text::trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

SurveyResponses parse_survey_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!text::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw SurveyError("survey file is empty");
  const auto header = split_csv(line);
  if (header.size() != kQuestionCount) throw SurveyError("header must list Q1..Q6");
  for (int q = 0; q < kQuestionCount; ++q)
    if (header[static_cast<std::size_t>(q)] != "Q" + std::to_string(q + 1)) throw SurveyError("header must list Q1..Q6");

  SurveyResponses out;
  while (next_line()) {
    const auto cells = split_csv(line);
    if (cells.size() != kQuestionCount)
      throw SurveyError("line " + std::to_string(lineno) + ": expected " + std::to_string(kQuestionCount) + " values");
    std::array<int, kQuestionCount> row{};
    for (std::size_t q = 0; q < cells.size(); ++q) {
      const auto& c = cells[q];
      if (c.size() != 1 || c[0] < '1' || c[0] > '5')
        throw SurveyError("line " + std::to_string(lineno) + ": '" + c + "' is not an integer in 1..5");
      row[q] = c[0] - '0';
    }
    out.rows.push_back(row);
  }
  return out;
}

SurveyResponses read_survey_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SurveyError("cannot open survey file " + path.string());
  return parse_survey_csv(in);
}

std::vector<LikertSummary> likert_summary(const SurveyResponses& responses) {
  responses.validate();
  if (responses.rows.empty()) throw SurveyError("survey has no respondents");
  std::vector<LikertSummary> out;
  for (int q = 0; q < kQuestionCount; ++q) {
    auto col = responses.column(q);
    LikertSummary s;
    for (double v : col) ++s.counts[static_cast<std::size_t>(v) - 1];
    s.mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    s.median = n % 2 ? col[n / 2] : (col[n / 2 - 1] + col[n / 2]) / 2.0;
    out.push_back(s);
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

std::vector<double> centered(std::vector<double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
  return v;
}

double norm(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw SurveyError("columns differ in length");
  if (x.size() < 2) throw SurveyError("correlation needs at least two respondents");
}

// Observed |rho| values within this distance count as ties in the test.
constexpr double kTieTolerance = 1e-12;

}  // namespace

double exact_permutation_p_value(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = centered(average_ranks(x));
  auto ry = centered(average_ranks(y));
  const double denom = norm(rx) * norm(ry);
  if (denom == 0.0) throw SurveyError("constant column");
  const double observed = std::abs(std::inner_product(rx.begin(), rx.end(), ry.begin(), 0.0) / denom);

  std::vector<std::size_t> perm(ry.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t extreme = 0, total = 0;
  do {
    double dot = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) dot += rx[i] * ry[perm[i]];
    if (std::abs(dot / denom) >= observed - kTieTolerance) ++extreme;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double t_approximation_p_value(double rho, std::size_t n) {
  if (n < 3) throw SurveyError("t approximation needs at least three respondents");
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

CorrelationCell spearman(std::span<const double> x, std::span<const double> y, std::size_t exact_limit) {
  check_pair(x, y);
  const auto rx = centered(average_ranks(x));
  const auto ry = centered(average_ranks(y));
  CorrelationCell cell;
  const double denom = norm(rx) * norm(ry);
  if (denom == 0.0) {
    cell.zero_variance = true;
    return cell;
  }
  const double rho = std::clamp(std::inner_product(rx.begin(), rx.end(), ry.begin(), 0.0) / denom, -1.0, 1.0);
  cell.rho = rho;
  if (x.size() <= exact_limit) {
    cell.method = PValueMethod::ExactPermutation;
    cell.p_value = exact_permutation_p_value(x, y);
  } else {
    cell.method = PValueMethod::TDistribution;
    cell.p_value = t_approximation_p_value(rho, x.size());
  }
  return cell;
}

std::vector<std::vector<CorrelationCell>> spearman_matrix(const SurveyResponses& responses) {
  responses.validate();
  if (responses.rows.size() < 2) throw SurveyError("correlation needs at least two respondents");
  std::vector<std::vector<double>> cols;
  for (int q = 0; q < kQuestionCount; ++q) cols.push_back(responses.column(q));
  std::vector<std::vector<CorrelationCell>> m(kQuestionCount, std::vector<CorrelationCell>(kQuestionCount));
  for (std::size_t i = 0; i < cols.size(); ++i)
    for (std::size_t j = i; j < cols.size(); ++j) {
      CorrelationCell c = spearman(cols[i], cols[j]);
      if (i == j && c.rho) c.rho = 1.0;
      m[i][j] = c;
      m[j][i] = c;
    }
  return m;
}

std::string format_likert_report(std::span<const LikertSummary> summary) {
  std::ostringstream out;
  out << "question  n1  n2  n3  n4  n5  mean  median\n";
  for (std::size_t q = 0; q < summary.size(); ++q) {
    const auto& s = summary[q];
    out << "Q" << q + 1 << "      ";
    for (int c : s.counts) out << std::setw(4) << c;
    out << std::fixed << std::setprecision(2) << std::setw(6) << s.mean << std::setw(8) << s.median << '\n';
  }
  return out.str();
}

std::string format_correlation_report(const std::vector<std::vector<CorrelationCell>>& matrix) {
  std::ostringstream out;
  out << "spearman rho (p-value)\n      ";
  for (std::size_t j = 0; j < matrix.size(); ++j) out << std::setw(16) << ("Q" + std::to_string(j + 1));
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << "Q" << i + 1 << "    ";
    for (const auto& c : matrix[i]) {
      std::ostringstream cell;
      if (c.zero_variance)
        cell << "undefined";
      else
        cell << std::fixed << std::setprecision(3) << *c.rho << " (" << std::setprecision(4) << *c.p_value << ")";
      out << std::setw(16) << cell.str();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace freetalky::analytics
