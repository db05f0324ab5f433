#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freetalky::analytics {

class SurveyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kQuestionCount = 6;

// Rows are respondents, columns Q1..Q6, entries in 1..5.
struct SurveyResponses {
  std::vector<std::array<int, kQuestionCount>> rows;

  void validate() const;
  std::vector<double> column(int question) const;
};

// CSV with header "Q1,Q2,Q3,Q4,Q5,Q6" and one respondent per line.
SurveyResponses parse_survey_csv(std::istream& in);
SurveyResponses read_survey_csv(const std::filesystem::path& path);

struct LikertSummary {
  std::array<int, 5> counts{};  // counts[k] = responses at level k + 1
  double mean = 0.0;
  double median = 0.0;
};

std::vector<LikertSummary> likert_summary(const SurveyResponses& responses);

// 1-based ranks; tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

enum class PValueMethod { ExactPermutation, TDistribution };

struct CorrelationCell {
  // Both empty when either column is constant.
  std::optional<double> rho;
  std::optional<double> p_value;
  bool zero_variance = false;
  PValueMethod method = PValueMethod::ExactPermutation;
};

inline constexpr std::size_t kExactPermutationLimit = 8;

// Pearson correlation of average ranks. Two-sided p-value: the share of all
// orderings of y whose |rho| reaches the observed one when n <= exact_limit,
// otherwise Student's t with n - 2 degrees of freedom.
CorrelationCell spearman(std::span<const double> x, std::span<const double> y,
                         std::size_t exact_limit = kExactPermutationLimit);

double exact_permutation_p_value(std::span<const double> x, std::span<const double> y);
double t_approximation_p_value(double rho, std::size_t n);

// Symmetric, unit diagonal unless the column is constant. Needs at least two
// respondents.
std::vector<std::vector<CorrelationCell>> spearman_matrix(const SurveyResponses& responses);

std::string format_likert_report(std::span<const LikertSummary> summary);
std::string format_correlation_report(const std::vector<std::vector<CorrelationCell>>& matrix);

}  // namespace freetalky::analytics
