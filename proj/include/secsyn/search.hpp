#pragma once

#include <secsyn/predictor.hpp>
#include <secsyn/techlib.hpp>
#include <secsyn/transforms.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace secsyn
{

class search_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief R/N + c * sqrt(ln N_parent / N); +infinity for an unvisited child. */
double uct_score( double reward_sum, double visits, double parent_visits, double c );

/*! \brief 0 when pt <= threshold, else pt / threshold. */
double normalize_reward( double pt, double pt_threshold );

struct search_params
{
  uint32_t horizon{ default_horizon };
  double c{ std::sqrt( 2.0 ) };
  double pt_threshold{ 1.0 };
  uint32_t iterations{ 500 };
  uint32_t fine_tune_interval{ 50 }; /* F */
  uint32_t k{ 3 };                   /* top-k and bottom-k recipes sent for actual evaluation */
  uint64_t seed{ 1 };
};

void validate_search_params( search_params const& p );

struct mcts_node
{
  int32_t parent{ -1 };
  action_id action{ 0 }; /* edge from the parent */
  uint32_t depth{ 0 };
  uint32_t visits{ 0 };
  double reward{ 0 };
  std::vector<int32_t> children;  /* indexed by action, -1 if not expanded */
  std::vector<action_id> unexplored;
};

struct visit_record
{
  uint32_t iteration{ 0 };
  recipe actions;
  double predicted{ 0 };
  double reward{ 0 };
  std::vector<int32_t> path; /* node ids from the root to the expanded node */
};

struct scored_recipe
{
  recipe actions;
  double predicted{ 0 };
  std::optional<double> actual;
  bool censored{ false };
};

struct search_result
{
  std::vector<mcts_node> tree; /* node 0 is the root; empty for SA */
  std::vector<visit_record> log;
  std::vector<scored_recipe> best;      /* highest predicted first */
  std::vector<scored_recipe> validated; /* recipes that received an actual evaluation, in order */
  uint32_t scorer_calls{ 0 };  /* surrogate predictions for the guided search, actual evaluations for direct runs */
  uint32_t actual_evaluations{ 0 };
  uint32_t fine_tune_rounds{ 0 };
  uint32_t accepted_moves{ 0 }; /* SA only */
  std::vector<std::string> evaluator_failures;
};

using recipe_scorer = std::function<double( recipe const& )>;

/* actual evaluation of a batch of recipes; returns one entry per recipe that was evaluated */
using batch_evaluator = std::function<std::vector<scored_recipe>( std::vector<recipe> const& )>;

/*! \brief MCTS over length-T recipes with delayed terminal rewards.
 *
 * `score` gives the predicted pt_score of a complete recipe.  Every
 * `fine_tune_interval` iterations the top-k and bottom-k rollout recipes
 * by predicted score (not yet evaluated) go to `validate` when it is set.
 */
search_result mcts_search( recipe_scorer const& score, search_params const& p, batch_evaluator const& validate = {} );

/*! \brief Actual pre-countermeasure evaluation of one synthesized recipe. */
using sample_evaluator = std::function<labeled_sample( recipe const& )>;

/*! \brief The surrogate-guided search: terminal states are synthesized, mapped, featurized and predicted; validations fine-tune `model` in place. */
search_result mcts_search( aig const& g0, cell_library const& lib, surrogate_model& model, search_params const& p, sample_evaluator const& evaluator,
                           gbrt_params const& fine_tune_params = {} );

/*! \brief Terminal-state features: apply_recipe, map and extract_features. */
feature_vector recipe_features( aig const& g0, cell_library const& lib, recipe const& r );

struct sa_schedule
{
  double initial_temperature{ 500.0 };
  double cooling{ 0.9 };           /* temperature <- cooling * temperature after each move */
  uint32_t evaluations{ 200 };     /* scorer calls, including the initial state */
  uint32_t restart_interval{ 0 };  /* moves between restarts from a fresh random recipe; 0 disables */
  uint32_t horizon{ default_horizon };
};

/*! \brief Simulated annealing over recipes; every visited (recipe, score) pair is logged. */
search_result sa_search( recipe_scorer const& score, sa_schedule const& schedule, uint64_t seed );

enum class extraction_policy
{
  most_rewarding,
  most_visited
};

extraction_policy parse_extraction_policy( std::string const& name );

/*! \brief Greedy root-to-leaf walk; a branch shorter than T is completed with the best rollout's suffix. */
recipe extract_best_recipe( search_result const& r, extraction_policy policy = extraction_policy::most_visited, uint32_t horizon = default_horizon );

std::string progress_to_csv( search_result const& r );

} // namespace secsyn
