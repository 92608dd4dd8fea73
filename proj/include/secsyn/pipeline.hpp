#pragma once

#include <secsyn/aes.hpp>
#include <secsyn/countermeasures.hpp>
#include <secsyn/power.hpp>
#include <secsyn/predictor.hpp>
#include <secsyn/search.hpp>
#include <secsyn/techlib.hpp>
#include <secsyn/transforms.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace secsyn
{

/* exit code 2 */
class config_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/* exit code 3 */
class verification_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct design_config
{
  std::string source{ "aes-byte" }; /* "aes-byte" or an AIGER path computing SBOX(pt ^ key) */
  uint8_t key{ 0x2b };
  sbox_style sbox{ sbox_style::table };
  uint32_t capture_loads{ 64 };
};

struct collect_config
{
  uint32_t samples{ 200 };
  double sa_fraction{ 0.25 };    /* share of recipes taken from feature-novelty annealing runs */
  uint32_t sa_evaluations{ 20 }; /* feature evaluations per annealing run */
  uint64_t seed{ 7 };
};

struct compare_config
{
  uint32_t direct_evaluations{ 12 };
  double budget_seconds{ 600 };
  uint32_t monotonicity_recipes{ 20 };
  uint32_t timing_samples{ 30 }; /* recipes timed for the surrogate cost */
  uint64_t seed{ 5 };
};

struct experiment_config
{
  design_config design;
  library_params library;
  attack_config attack;
  countermeasure_kind countermeasure{ countermeasure_kind::elb };
  collect_config collect;
  gbrt_params predictor;
  uint64_t predictor_seed{ 1 };
  search_params search;             /* pt_threshold 0 selects the median training label */
  extraction_policy extraction{ extraction_policy::most_visited };
  sa_schedule sa;
  compare_config compare;
  std::string output{ "out" };
};

constexpr int config_schema = 1;

std::string config_to_json( experiment_config const& cfg );

/*! \brief Strict parse: unknown keys, wrong types and invalid values raise config_error. */
experiment_config config_from_json( std::string const& text );
experiment_config load_config( std::string const& path );

/*! \brief Applies `dotted.key=value` on top of the config (value parsed as JSON, else as a string). */
void apply_override( experiment_config& cfg, std::string const& assignment );

void validate_config( experiment_config const& cfg );

/*! \brief 16 hex digits of FNV-1a over the canonical JSON form. */
std::string config_hash( experiment_config const& cfg );

/*! \brief Hash of the fields that determine labels (design, library, attack). */
std::string evaluation_hash( experiment_config const& cfg );

/*! \brief `# secsyn config_hash=... ` comment line for CSV artifacts. */
std::string artifact_header( experiment_config const& cfg );

struct pipeline_context
{
  experiment_config cfg;
  cell_library lib;
  aig design; /* unsynthesized target */
};

pipeline_context make_context( experiment_config const& cfg );

/*! \brief apply_recipe + map, each verified against the design; throws verification_error with the witness. */
netlist synthesize( pipeline_context const& ctx, recipe const& r );

crypto_design make_target( pipeline_context const& ctx, netlist const& n );

/*! \brief Applies the countermeasure and verifies every phase against the unprotected design. */
crypto_design protect( pipeline_context const& ctx, crypto_design const& d, countermeasure_kind k );

pt_score_report attack( pipeline_context const& ctx, crypto_design const& d );

/*! \brief Actual pre-countermeasure pt_score of a recipe as a dataset row. */
labeled_sample label_recipe( pipeline_context const& ctx, recipe const& r );

struct recipe_evaluation
{
  recipe actions;
  countermeasure_kind countermeasure{ countermeasure_kind::none };
  feature_vector features;
  pt_score_report pre;
  pt_score_report post; /* equals pre for countermeasure none */
  ppa_report pre_ppa;
  ppa_report post_ppa;
  double pre_seconds{ 0 };
  double post_seconds{ 0 };
};

recipe_evaluation evaluate_recipe( pipeline_context const& ctx, recipe const& r, countermeasure_kind k );

/* ---- collection ---- */

/*! \brief Deterministic recipe list: uniform random recipes first, then one recipe per novelty-seeking annealing run. */
std::vector<recipe> collection_recipes( pipeline_context const& ctx );

struct collect_summary
{
  std::vector<labeled_sample> samples; /* in collection order */
  uint32_t new_evaluations{ 0 };
  uint32_t reused{ 0 };
};

/*! \brief Labels every collection recipe absent from `existing` (matched by recipe hash), at most `limit` new ones. */
collect_summary collect_dataset( pipeline_context const& ctx, std::vector<labeled_sample> const& existing,
                                 std::function<void( labeled_sample const& )> const& on_new = {},
                                 uint32_t limit = std::numeric_limits<uint32_t>::max() );

uint64_t recipe_hash( recipe const& r );

/* ---- search ---- */

double median_label( surrogate_model const& m );

struct pipeline_run
{
  search_result search;
  surrogate_model model; /* after fine-tuning */
  double threshold{ 0 };
  std::optional<scored_recipe> best_validated; /* highest actual pt_score among validated recipes */
  recipe extracted;
};

/*! \brief Surrogate-guided MCTS with fine-tuning on actual pre-countermeasure evaluations. */
pipeline_run run_pipeline_search( pipeline_context const& ctx, surrogate_model const& model, uint64_t seed );

struct direct_run
{
  search_result search;
  scored_recipe best;
  double seconds_per_evaluation{ 0 };
};

/*! \brief SA and MCTS whose scorer is the actual pre-countermeasure pt_score. */
direct_run sa_direct( pipeline_context const& ctx, uint32_t evaluations, uint64_t seed );
direct_run mcts_direct( pipeline_context const& ctx, uint32_t evaluations, double threshold, uint64_t seed );

/*! \brief Mean wall-clock of one surrogate evaluation (synthesis, mapping, features, prediction) over random recipes. */
double surrogate_seconds( pipeline_context const& ctx, surrogate_model const& model, uint32_t samples, uint64_t seed );

/* ---- reports ---- */

std::string evaluation_csv_header();
std::string evaluation_csv_row( std::string const& label, recipe_evaluation const& e );

struct compare_row
{
  std::string method;
  countermeasure_kind countermeasure;
  recipe actions;
  pt_score_report score;
  ppa_report ppa;
  uint32_t actual_evaluations{ 0 };
  uint32_t surrogate_evaluations{ 0 };
  double seconds_per_evaluation{ 0 }; /* the method's per-iteration cost for this objective */
  uint64_t iterations_in_budget{ 0 };
  double speedup{ 1.0 };             /* iterations_in_budget relative to the direct methods */
};

struct compare_report
{
  std::vector<compare_row> rows;
  double surrogate_seconds{ 0 };
  double direct_pre_seconds{ 0 };
  double direct_post_seconds{ 0 };
  double monotonicity_spearman{ 0 };
  uint32_t monotonicity_recipes{ 0 };
  uint32_t monotonicity_censored{ 0 };
};

/*! \brief Iterations affordable in `budget_seconds` at `seconds_per_evaluation`. */
uint64_t iterations_in_budget( double budget_seconds, double seconds_per_evaluation );

/*! \brief Baseline, SA-direct, MCTS-direct and the full pipeline under each countermeasure setting.
 *
 * Also evaluates the pre/post monotonicity over the first
 * `compare.monotonicity_recipes` dataset rows.  `log` receives progress lines.
 */
compare_report run_compare( pipeline_context const& ctx, surrogate_model const& model, std::vector<labeled_sample> const& dataset,
                            std::function<void( std::string const& )> const& log = {} );

std::string compare_to_csv( compare_report const& r );

} // namespace secsyn
