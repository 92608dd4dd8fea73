#include <secsyn/search.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace secsyn
{

double uct_score( double reward_sum, double visits, double parent_visits, double c )
{
  if ( reward_sum < 0 || visits < 0 || parent_visits < 0 || c < 0 )
    throw search_error( "uct_score: negative input" );
  if ( parent_visits < visits )
    throw search_error( "uct_score: child visits exceed parent visits" );
  if ( visits == 0 )
    return std::numeric_limits<double>::infinity();
  return reward_sum / visits + c * std::sqrt( std::log( parent_visits ) / visits );
}

double normalize_reward( double pt, double pt_threshold )
{
  if ( !( pt_threshold > 0 ) )
    throw search_error( "PT threshold must be positive" );
  return pt <= pt_threshold ? 0.0 : pt / pt_threshold;
}

void validate_search_params( search_params const& p )
{
  if ( p.horizon == 0u )
    throw search_error( "horizon must be at least 1" );
  if ( !( p.c > 0 ) )
    throw search_error( "exploration constant must be positive" );
  if ( !( p.pt_threshold > 0 ) )
    throw search_error( "PT threshold must be positive" );
  if ( p.iterations == 0u )
    throw search_error( "iteration budget must be positive" );
}

namespace
{

int32_t add_node( std::vector<mcts_node>& tree, int32_t parent, action_id a, uint32_t depth, uint32_t horizon )
{
  mcts_node n;
  n.parent = parent;
  n.action = a;
  n.depth = depth;
  n.children.assign( num_actions(), -1 );
  if ( depth < horizon )
  {
    for ( action_id x = 0; x < num_actions(); ++x )
      n.unexplored.push_back( x );
  }
  tree.push_back( std::move( n ) );
  return int32_t( tree.size() - 1u );
}

std::vector<scored_recipe> rank_by_prediction( std::vector<visit_record> const& log, std::size_t limit )
{
  std::vector<visit_record const*> order;
  for ( auto const& v : log )
    order.push_back( &v );
  std::stable_sort( order.begin(), order.end(), []( auto const* a, auto const* b ) { return a->predicted > b->predicted; } );
  std::set<recipe> seen;
  std::vector<scored_recipe> out;
  for ( auto const* v : order )
  {
    if ( out.size() == limit )
      break;
    if ( seen.insert( v->actions ).second )
      out.push_back( { v->actions, v->predicted, std::nullopt, false } );
  }
  return out;
}

} // namespace

search_result mcts_search( recipe_scorer const& score, search_params const& p, batch_evaluator const& validate )
{
  validate_search_params( p );
  std::mt19937_64 rng( p.seed );
  search_result r;
  auto& tree = r.tree;
  add_node( tree, -1, 0, 0, p.horizon );
  std::set<recipe> evaluated;

  for ( uint32_t it = 1; it <= p.iterations; ++it )
  {
    /* selection */
    int32_t node = 0;
    std::vector<int32_t> path{ 0 };
    while ( tree[node].depth < p.horizon && tree[node].unexplored.empty() )
    {
      int32_t best = -1;
      double best_score = -1;
      for ( auto child : tree[node].children )
      {
        if ( child < 0 )
          continue;
        auto const s = uct_score( tree[child].reward, tree[child].visits, tree[node].visits, p.c );
        if ( best < 0 || s > best_score )
        {
          best = child;
          best_score = s;
        }
      }
      node = best;
      path.push_back( node );
    }

    /* expansion of one random unexplored action */
    if ( tree[node].depth < p.horizon )
    {
      auto& open = tree[node].unexplored;
      auto const pick = std::size_t( rng() % open.size() );
      auto const a = open[pick];
      open.erase( open.begin() + std::ptrdiff_t( pick ) );
      auto const child = add_node( tree, node, a, tree[node].depth + 1u, p.horizon );
      tree[node].children[a] = child;
      node = child;
      path.push_back( node );
    }

    /* rollout */
    visit_record v;
    v.iteration = it;
    for ( std::size_t i = 1; i < path.size(); ++i )
      v.actions.push_back( tree[path[i]].action );
    while ( v.actions.size() < p.horizon )
      v.actions.push_back( action_id( rng() % num_actions() ) );
    v.predicted = score( v.actions );
    ++r.scorer_calls;
    v.reward = normalize_reward( v.predicted, p.pt_threshold );

    /* backpropagation of the terminal reward along the trajectory */
    for ( auto id : path )
    {
      ++tree[id].visits;
      tree[id].reward += v.reward;
    }
    v.path = std::move( path );
    r.log.push_back( std::move( v ) );

    if ( validate && p.fine_tune_interval > 0u && it % p.fine_tune_interval == 0u )
    {
      std::vector<visit_record const*> pending;
      std::set<recipe> picked;
      for ( auto const& rec : r.log )
      {
        if ( !evaluated.count( rec.actions ) && picked.insert( rec.actions ).second )
          pending.push_back( &rec );
      }
      std::stable_sort( pending.begin(), pending.end(), []( auto const* a, auto const* b ) { return a->predicted > b->predicted; } );
      std::vector<recipe> batch;
      std::map<recipe, double> predicted;
      auto const top = std::min<std::size_t>( p.k, pending.size() );
      for ( std::size_t i = 0; i < top; ++i )
        batch.push_back( pending[i]->actions );
      for ( std::size_t i = pending.size(); i > top && batch.size() < 2u * top; --i )
        batch.push_back( pending[i - 1]->actions );
      for ( auto const* rec : pending )
        predicted[rec->actions] = rec->predicted;
      for ( auto const& b : batch )
        evaluated.insert( b );
      for ( auto s : validate( batch ) )
      {
        s.predicted = predicted[s.actions];
        r.validated.push_back( std::move( s ) );
        ++r.actual_evaluations;
      }
      ++r.fine_tune_rounds;
    }
  }

  r.best = rank_by_prediction( r.log, std::max<std::size_t>( p.k, 1u ) );
  for ( auto& b : r.best )
  {
    for ( auto const& v : r.validated )
    {
      if ( v.actions == b.actions )
      {
        b.actual = v.actual;
        b.censored = v.censored;
      }
    }
  }
  return r;
}

feature_vector recipe_features( aig const& g0, cell_library const& lib, recipe const& r )
{
  return extract_features( map_aig( apply_recipe( g0, r ), lib ), lib );
}

search_result mcts_search( aig const& g0, cell_library const& lib, surrogate_model& model, search_params const& p, sample_evaluator const& evaluator,
                           gbrt_params const& fine_tune_params )
{
  if ( !model.trained )
    throw search_error( "the search needs a trained model" );
  std::map<recipe, feature_vector> features;
  std::vector<std::string> failures;
  auto score = [&]( recipe const& r ) {
    auto it = features.find( r );
    if ( it == features.end() )
      it = features.emplace( r, recipe_features( g0, lib, r ) ).first;
    return predict( model, it->second );
  };
  auto validate = [&]( std::vector<recipe> const& batch ) {
    std::vector<scored_recipe> out;
    std::vector<labeled_sample> samples;
    for ( auto const& r : batch )
    {
      labeled_sample s;
      try
      {
        s = evaluator( r );
      }
      catch ( std::exception const& e )
      {
        failures.push_back( format_recipe( r ) + ": " + e.what() );
        continue;
      }
      out.push_back( { r, 0.0, s.label, s.censored } );
      samples.push_back( std::move( s ) );
    }
    if ( !samples.empty() )
      model = fine_tune( model, samples, fine_tune_params ).model;
    return out;
  };
  auto r = mcts_search( score, p, evaluator ? batch_evaluator( validate ) : batch_evaluator{} );
  r.evaluator_failures = std::move( failures );
  return r;
}

extraction_policy parse_extraction_policy( std::string const& name )
{
  if ( name == "most_visited" )
    return extraction_policy::most_visited;
  if ( name == "most_rewarding" )
    return extraction_policy::most_rewarding;
  throw search_error( "unknown extraction policy '" + name + "' (expected most_visited or most_rewarding)" );
}

recipe extract_best_recipe( search_result const& r, extraction_policy policy, uint32_t horizon )
{
  if ( r.tree.empty() )
    throw search_error( "cannot extract a recipe from an empty tree" );
  recipe out;
  int32_t node = 0;
  while ( out.size() < horizon )
  {
    int32_t best = -1;
    double best_value = 0;
    for ( auto child : r.tree[node].children )
    {
      if ( child < 0 || r.tree[child].visits == 0u )
        continue;
      auto const& c = r.tree[child];
      auto const value = policy == extraction_policy::most_visited ? double( c.visits ) : c.reward / double( c.visits );
      if ( best < 0 || value > best_value )
      {
        best = child;
        best_value = value;
      }
    }
    if ( best < 0 )
      break;
    out.push_back( r.tree[best].action );
    node = best;
  }
  if ( out.size() < horizon )
  {
    auto const top = rank_by_prediction( r.log, 1 );
    if ( top.empty() )
      throw search_error( "no rollout to complete the extracted recipe" );
    for ( auto i = out.size(); i < horizon && i < top.front().actions.size(); ++i )
      out.push_back( top.front().actions[i] );
  }
  return out;
}

std::string progress_to_csv( search_result const& r )
{
  std::ostringstream os;
  os.precision( 17 );
  os << "iteration,recipe,predicted_pt,normalized_reward\n";
  for ( auto const& v : r.log )
    os << v.iteration << ',' << format_recipe( v.actions ) << ',' << v.predicted << ',' << v.reward << '\n';
  return os.str();
}

} // namespace secsyn
