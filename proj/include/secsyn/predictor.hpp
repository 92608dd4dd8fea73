#pragma once

#include <secsyn/techlib.hpp>
#include <secsyn/transforms.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace secsyn
{

class predictor_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

constexpr uint32_t num_features = 3u;
using feature_array = std::array<double, num_features>;

inline feature_array to_array( feature_vector const& f )
{
  return { f.f1_overall_diversity, f.f2_lvt_area_pct, f.f3_hvt_area_pct };
}

/*! \brief Pre-countermeasure pt_score of one synthesized recipe. */
struct labeled_sample
{
  recipe actions;
  feature_vector features;
  double label{ 0 }; /* trace count; the cap for censored samples */
  bool censored{ false };
};

struct gbrt_params
{
  uint32_t trees{ 200 };
  uint32_t depth{ 3 };
  double learning_rate{ 0.1 };
  uint32_t min_leaf{ 2 };
  uint32_t extra_trees{ 50 }; /* trees added per fine-tuning round */
  double test_fraction{ 0.2 };
};

void validate_gbrt_params( gbrt_params const& hp );

/* flat binary tree; leaves have feature < 0 */
struct tree_node
{
  int32_t feature{ -1 };
  double threshold{ 0 };
  int32_t left{ -1 };
  int32_t right{ -1 };
  double value{ 0 };
};

struct regression_tree
{
  std::vector<tree_node> nodes;

  double evaluate( feature_array const& x ) const;
};

struct surrogate_model
{
  double base{ 0 };
  double learning_rate{ 0.1 };
  std::vector<regression_tree> trees;
  uint64_t seed{ 0 };
  /* samples the ensemble was fitted on, kept for fine-tuning */
  std::vector<feature_array> corpus_x;
  std::vector<double> corpus_y;
  bool trained{ false };
};

struct train_metrics
{
  std::size_t train_samples{ 0 };
  std::size_t test_samples{ 0 };
  std::size_t censored_excluded{ 0 };
  double train_rmse{ 0 };
  double test_rmse{ 0 };
  double mean_predictor_rmse{ 0 }; /* test RMSE of predicting the training-label mean */
  double test_spearman{ 0 };
  double label_std{ 0 };
  double max_shift_on_corpus{ 0 }; /* fine-tuning: largest prediction change on previously fitted samples */
};

struct training_result
{
  surrogate_model model;
  train_metrics metrics;
};

/*! \brief Stagewise least-squares boosting of depth-limited trees on f1-f3.
 *
 * Censored samples are excluded.  Non-censored samples are split by a
 * seeded shuffle into training and test parts; the model is fitted on the
 * training part only.
 */
training_result train( std::vector<labeled_sample> const& samples, gbrt_params const& hp, uint64_t seed );

double predict( surrogate_model const& m, feature_vector const& fv );
double predict( surrogate_model const& m, feature_array const& x );

/*! \brief Warm start: appends the non-censored samples to the corpus and boosts `hp.extra_trees` more trees on it. */
training_result fine_tune( surrogate_model const& m, std::vector<labeled_sample> const& new_samples, gbrt_params const& hp );

double rmse( std::vector<double> const& predictions, std::vector<double> const& labels );

/*! \brief Rank correlation with average ranks for ties; 0 when either side is constant. */
double spearman( std::vector<double> const& x, std::vector<double> const& y );

std::string model_to_json( surrogate_model const& m );
surrogate_model model_from_json( std::string const& text );

std::string metrics_to_json( train_metrics const& m );

/* CSV columns: recipe, f1, f2, f3, label, censored */
std::string dataset_to_csv( std::vector<labeled_sample> const& samples );
std::vector<labeled_sample> dataset_from_csv( std::string const& text );

} // namespace secsyn
