#include <secsyn/pipeline.hpp>

#include <chrono>
#include <map>

namespace secsyn
{

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since( clock_type::time_point t0 )
{
  return std::chrono::duration<double>( clock_type::now() - t0 ).count();
}

struct timing
{
  double total{ 0 };
  uint32_t count{ 0 };

  void add( double s )
  {
    total += s;
    ++count;
  }
  double mean() const { return count ? total / double( count ) : 0.0; }
};

struct method
{
  std::string name;
  recipe actions;
  uint32_t actual{ 0 };
  uint32_t surrogate{ 0 };
};

constexpr countermeasure_kind all_settings[] = { countermeasure_kind::none, countermeasure_kind::elb, countermeasure_kind::quadseal };

} // namespace

compare_report run_compare( pipeline_context const& ctx, surrogate_model const& model, std::vector<labeled_sample> const& dataset,
                            std::function<void( std::string const& )> const& log )
{
  auto const& cc = ctx.cfg.compare;
  auto say = [&]( std::string const& s ) {
    if ( log )
      log( s );
  };
  if ( dataset.size() < cc.monotonicity_recipes )
    throw config_error( "compare needs " + std::to_string( cc.monotonicity_recipes ) + " dataset rows, found " + std::to_string( dataset.size() ) );
  auto const threshold = ctx.cfg.search.pt_threshold > 0 ? ctx.cfg.search.pt_threshold : median_label( model );

  compare_report rep;
  timing pre_time;
  std::map<countermeasure_kind, timing> post_time;

  say( "sa-direct" );
  auto const sa = sa_direct( ctx, cc.direct_evaluations, cc.seed );
  say( "mcts-direct" );
  auto const mc = mcts_direct( ctx, cc.direct_evaluations, threshold, cc.seed );
  for ( auto const* d : { &sa, &mc } )
  {
    for ( uint32_t i = 0; i < d->search.actual_evaluations; ++i )
      pre_time.add( d->seconds_per_evaluation );
  }
  say( "pipeline search" );
  auto const pipe = run_pipeline_search( ctx, model, cc.seed );

  std::vector<method> methods{ { "baseline", compress2rs_like_recipe(), 0, 0 },
                               { "sa_direct", sa.best.actions, sa.search.actual_evaluations, 0 },
                               { "mcts_direct", mc.best.actions, mc.search.actual_evaluations, 0 },
                               { "pipeline", pipe.best_validated ? pipe.best_validated->actions : pipe.extracted, pipe.search.actual_evaluations,
                                 pipe.search.scorer_calls } };

  auto const post_kind = ctx.cfg.countermeasure == countermeasure_kind::none ? countermeasure_kind::elb : ctx.cfg.countermeasure;
  say( "monotonicity over " + std::to_string( cc.monotonicity_recipes ) + " recipes" );
  std::vector<double> pre, post;
  for ( uint32_t i = 0; i < cc.monotonicity_recipes; ++i )
  {
    auto const& s = dataset[i];
    auto const d = protect( ctx, make_target( ctx, synthesize( ctx, s.actions ) ), post_kind );
    auto const t0 = clock_type::now();
    auto const r = attack( ctx, d );
    post_time[post_kind].add( seconds_since( t0 ) );
    pre.push_back( s.label );
    post.push_back( double( r.value_or_cap() ) );
    rep.monotonicity_censored += r.censored() ? 1u : 0u;
  }
  rep.monotonicity_recipes = cc.monotonicity_recipes;
  rep.monotonicity_spearman = pre.size() >= 2u ? spearman( pre, post ) : 0.0;

  for ( auto const& m : methods )
  {
    say( "evaluating " + m.name );
    auto const n = synthesize( ctx, m.actions );
    auto const d = make_target( ctx, n );
    for ( auto k : all_settings )
    {
      compare_row row;
      row.method = m.name;
      row.countermeasure = k;
      row.actions = m.actions;
      row.actual_evaluations = m.actual;
      row.surrogate_evaluations = m.surrogate;
      auto const target = k == countermeasure_kind::none ? d : protect( ctx, d, k );
      auto const t0 = clock_type::now();
      row.score = attack( ctx, target );
      auto const t = seconds_since( t0 );
      ( k == countermeasure_kind::none ? pre_time : post_time[k] ).add( t );
      row.ppa = ppa( target.circuit, ctx.lib );
      rep.rows.push_back( std::move( row ) );
    }
  }

  rep.surrogate_seconds = surrogate_seconds( ctx, model, cc.timing_samples, cc.seed );
  rep.direct_pre_seconds = pre_time.mean();
  rep.direct_post_seconds = post_time[post_kind].mean();

  for ( auto& row : rep.rows )
  {
    auto const direct = row.countermeasure == countermeasure_kind::none ? pre_time.mean() : post_time[row.countermeasure].mean();
    auto const direct_iterations = iterations_in_budget( cc.budget_seconds, direct );
    if ( row.method == "baseline" )
    {
      row.speedup = 0;
      continue;
    }
    if ( row.method == "pipeline" )
    {
      /* the validation runs are charged to the budget before counting surrogate iterations */
      row.seconds_per_evaluation = rep.surrogate_seconds;
      row.iterations_in_budget = iterations_in_budget( cc.budget_seconds - double( row.actual_evaluations ) * pre_time.mean(), rep.surrogate_seconds );
      row.speedup = direct_iterations ? double( row.iterations_in_budget ) / double( direct_iterations ) : 0.0;
    }
    else
    {
      row.seconds_per_evaluation = direct;
      row.iterations_in_budget = direct_iterations;
      row.speedup = 1.0;
    }
  }
  return rep;
}

} // namespace secsyn
