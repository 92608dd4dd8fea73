#include <secsyn/search.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace secsyn
{

search_result sa_search( recipe_scorer const& score, sa_schedule const& schedule, uint64_t seed )
{
  if ( schedule.evaluations == 0u || schedule.horizon == 0u )
    throw search_error( "empty annealing schedule" );
  if ( schedule.initial_temperature < 0 || !( schedule.cooling > 0 && schedule.cooling <= 1 ) )
    throw search_error( "annealing temperature must be non-negative and cooling in (0, 1]" );

  std::mt19937_64 rng( seed );
  std::uniform_real_distribution<double> unit;
  auto random_recipe = [&]() {
    recipe r( schedule.horizon );
    for ( auto& a : r )
      a = action_id( rng() % num_actions() );
    return r;
  };

  search_result r;
  auto log = [&]( recipe const& x, double s ) {
    r.log.push_back( { r.scorer_calls, x, s, 0.0, {} } );
    ++r.scorer_calls;
  };

  auto state = random_recipe();
  auto current = score( state );
  log( state, current );
  auto temperature = schedule.initial_temperature;
  uint32_t moves = 0;
  while ( r.scorer_calls < schedule.evaluations )
  {
    if ( schedule.restart_interval > 0u && moves > 0u && moves % schedule.restart_interval == 0u )
    {
      state = random_recipe();
      current = score( state );
      log( state, current );
      temperature = schedule.initial_temperature;
      ++moves;
      continue;
    }
    auto next = state;
    next[rng() % next.size()] = action_id( rng() % num_actions() );
    auto const s = score( next );
    log( next, s );
    auto const delta = s - current;
    if ( delta >= 0 || ( temperature > 0 && unit( rng ) < std::exp( delta / temperature ) ) )
    {
      state = std::move( next );
      current = s;
      ++r.accepted_moves;
    }
    temperature *= schedule.cooling;
    ++moves;
  }

  std::vector<visit_record const*> order;
  for ( auto const& v : r.log )
    order.push_back( &v );
  std::stable_sort( order.begin(), order.end(), []( auto const* a, auto const* b ) { return a->predicted > b->predicted; } );
  std::set<recipe> seen;
  for ( auto const* v : order )
  {
    if ( seen.insert( v->actions ).second )
      r.best.push_back( { v->actions, v->predicted, std::nullopt, false } );
  }
  return r;
}

} // namespace secsyn
