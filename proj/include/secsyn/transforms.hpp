#pragma once

#include <secsyn/aig.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace secsyn
{

using action_id = uint32_t;
using recipe = std::vector<action_id>;

constexpr uint32_t default_horizon = 18u;

struct action_info
{
  action_id id;
  std::string name;     /* canonical recipe mnemonic, e.g. "resub K=8 -z" */
  std::string short_name;
};

class recipe_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief The action vocabulary, ids dense in `[0, num_actions())`. */
std::vector<action_info> const& action_set();
uint32_t num_actions();

/*! \brief One functionality-preserving transformation step.
 *
 * Deterministic in `(g, a, seed)`; the seed only breaks ties between
 * otherwise equivalent choices.  Never returns more AND nodes than `g`
 * has after cleanup.
 */
aig apply_action( aig const& g, action_id a, uint64_t seed = 0 );

/*! \brief Left fold of `apply_action` over the recipe, every step using `seed`. */
aig apply_recipe( aig const& g, recipe const& r, uint64_t seed = 0 );

/*! \brief Parses "balance; rewrite; resub K=8 -z" (case-insensitive, short names accepted). */
recipe parse_recipe( std::string_view text );
std::string format_recipe( recipe const& r );
void validate_recipe( recipe const& r, uint32_t horizon = default_horizon );

/*! \brief Fixed 18-step baseline in the spirit of compress2rs. */
recipe compress2rs_like_recipe();

/* individual passes */
aig balance( aig const& g, uint64_t seed = 0 );
aig rewrite( aig const& g, bool zero_cost );
aig refactor( aig const& g, bool zero_cost );
aig resubstitute( aig const& g, uint32_t max_leaves, bool zero_cost );

} // namespace secsyn
