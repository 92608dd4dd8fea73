#include <secsyn/pipeline.hpp>
#include <secsyn/seeding.hpp>
#include <secsyn/simulation.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace secsyn
{

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since( clock_type::time_point t0 )
{
  return std::chrono::duration<double>( clock_type::now() - t0 ).count();
}

std::string format_witness( std::vector<bool> const& w )
{
  std::string s;
  for ( auto b : w )
    s += b ? '1' : '0';
  return s;
}

void require_equal( aig const& a, aig const& b, std::string const& what, recipe const& r )
{
  auto const eq = equivalent( a, b );
  if ( !eq.holds() )
    throw verification_error( what + " is not equivalent to the design for recipe '" + format_recipe( r ) + "' (witness inputs " + format_witness( eq.witness ) + ")" );
}

recipe random_recipe( std::mt19937_64& rng, uint32_t horizon )
{
  recipe r( horizon );
  for ( auto& a : r )
    a = action_id( rng() % num_actions() );
  return r;
}

/* f1 is a count of (kind, vt) pairs; bring it to the scale of the area fractions */
feature_array scaled( feature_vector const& f )
{
  return { f.f1_overall_diversity / 10.0, f.f2_lvt_area_pct, f.f3_hvt_area_pct };
}

double distance( feature_array const& a, feature_array const& b )
{
  double s = 0;
  for ( uint32_t i = 0; i < num_features; ++i )
    s += ( a[i] - b[i] ) * ( a[i] - b[i] );
  return std::sqrt( s );
}

double mean( std::vector<double> const& v )
{
  if ( v.empty() )
    return 0;
  double s = 0;
  for ( auto x : v )
    s += x;
  return s / double( v.size() );
}

} // namespace

pipeline_context make_context( experiment_config const& cfg )
{
  validate_config( cfg );
  pipeline_context ctx{ cfg, generate_library( cfg.library ), {} };
  if ( cfg.design.source == "aes-byte" )
  {
    ctx.design = build_aes_byte( cfg.design.key, false, cfg.design.sbox );
    return ctx;
  }
  try
  {
    ctx.design = read_aiger_file( cfg.design.source );
  }
  catch ( std::exception const& e )
  {
    throw config_error( "unreadable design '" + cfg.design.source + "': " + e.what() );
  }
  if ( ctx.design.num_inputs() != 8u || ctx.design.num_outputs() != 8u )
    throw config_error( "design '" + cfg.design.source + "' must have 8 inputs and 8 outputs" );
  auto const& sbox = aes_sbox();
  for ( uint32_t pt = 0; pt < 256u; ++pt )
  {
    std::vector<bool> in( 8 );
    for ( uint32_t i = 0; i < 8u; ++i )
      in[i] = ( pt >> i ) & 1u;
    auto const out = simulate( ctx.design, in );
    uint32_t y = 0;
    for ( uint32_t i = 0; i < 8u; ++i )
      y |= uint32_t( out[i] ) << i;
    if ( y != sbox[pt ^ cfg.design.key] )
      throw verification_error( "design '" + cfg.design.source + "' does not compute SBOX(pt ^ key) at pt " + std::to_string( pt ) );
  }
  return ctx;
}

netlist synthesize( pipeline_context const& ctx, recipe const& r )
{
  auto const g = apply_recipe( ctx.design, r );
  require_equal( ctx.design, g, "synthesized AIG", r );
  auto n = map_aig( g, ctx.lib );
  require_equal( ctx.design, to_aig( n ), "mapped netlist", r );
  return n;
}

crypto_design make_target( pipeline_context const& ctx, netlist const& n )
{
  capture_params cp;
  cp.loads = ctx.cfg.design.capture_loads;
  return make_crypto_design( n, ctx.cfg.design.key, cp );
}

crypto_design protect( pipeline_context const& ctx, crypto_design const& d, countermeasure_kind k )
{
  auto p = apply_countermeasure( d, ctx.lib, k );
  auto const check = verify_countermeasure( d, p );
  if ( !check.equal )
  {
    throw verification_error( std::string( countermeasure_name( k ) ) + " output differs from the unprotected design in phase " + std::to_string( check.phase ) +
                              " at plaintext " + std::to_string( check.plaintext ) );
  }
  return p;
}

pt_score_report attack( pipeline_context const& ctx, crypto_design const& d )
{
  return pt_score( d, ctx.lib, ctx.cfg.attack );
}

labeled_sample label_recipe( pipeline_context const& ctx, recipe const& r )
{
  auto const n = synthesize( ctx, r );
  auto const rep = attack( ctx, make_target( ctx, n ) );
  return { r, extract_features( n, ctx.lib ), double( rep.value_or_cap() ), rep.censored() };
}

recipe_evaluation evaluate_recipe( pipeline_context const& ctx, recipe const& r, countermeasure_kind k )
{
  recipe_evaluation e;
  e.actions = r;
  e.countermeasure = k;
  auto const n = synthesize( ctx, r );
  e.features = extract_features( n, ctx.lib );
  auto const d = make_target( ctx, n );
  e.pre_ppa = ppa( d.circuit, ctx.lib );
  auto t0 = clock_type::now();
  e.pre = attack( ctx, d );
  e.pre_seconds = seconds_since( t0 );
  if ( k == countermeasure_kind::none )
  {
    e.post = e.pre;
    e.post_ppa = e.pre_ppa;
    return e;
  }
  auto const p = protect( ctx, d, k );
  e.post_ppa = ppa( p.circuit, ctx.lib );
  t0 = clock_type::now();
  e.post = attack( ctx, p );
  e.post_seconds = seconds_since( t0 );
  return e;
}

uint64_t recipe_hash( recipe const& r )
{
  uint64_t h = 0xcbf29ce484222325ULL;
  for ( auto a : r )
  {
    h ^= uint64_t( a ) + 1u;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<recipe> collection_recipes( pipeline_context const& ctx )
{
  auto const& c = ctx.cfg.collect;
  auto const horizon = ctx.cfg.search.horizon;
  auto const n_sa = uint32_t( std::lround( double( c.samples ) * c.sa_fraction ) );
  auto const n_random = c.samples - n_sa;
  std::mt19937_64 rng( c.seed );
  std::vector<recipe> out;
  std::set<recipe> seen;
  while ( out.size() < n_random )
  {
    auto r = random_recipe( rng, horizon );
    if ( seen.insert( r ).second )
      out.push_back( std::move( r ) );
  }
  if ( n_sa == 0u )
    return out;

  /* annealing on feature novelty: distance to the nearest recipe collected so far */
  std::map<recipe, feature_array> cache;
  auto features = [&]( recipe const& r ) {
    auto it = cache.find( r );
    if ( it == cache.end() )
      it = cache.emplace( r, scaled( recipe_features( ctx.design, ctx.lib, r ) ) ).first;
    return it->second;
  };
  std::vector<feature_array> anchors{ features( compress2rs_like_recipe() ) };
  for ( auto const& r : out )
    anchors.push_back( features( r ) );
  sa_schedule s;
  s.initial_temperature = 0.05;
  s.cooling = 0.9;
  s.evaluations = c.sa_evaluations;
  s.horizon = horizon;
  for ( uint32_t i = 0; i < n_sa; ++i )
  {
    auto const run = sa_search(
        [&]( recipe const& r ) {
          auto const f = features( r );
          double nearest = std::numeric_limits<double>::infinity();
          for ( auto const& a : anchors )
            nearest = std::min( nearest, distance( f, a ) );
          return nearest;
        },
        s, derive_seed( c.seed, { 1u, i } ) );
    auto pick = std::find_if( run.best.begin(), run.best.end(), [&]( auto const& b ) { return !seen.count( b.actions ); } );
    recipe r = pick != run.best.end() ? pick->actions : random_recipe( rng, horizon );
    while ( seen.count( r ) )
      r = random_recipe( rng, horizon );
    seen.insert( r );
    anchors.push_back( features( r ) );
    out.push_back( std::move( r ) );
  }
  return out;
}

collect_summary collect_dataset( pipeline_context const& ctx, std::vector<labeled_sample> const& existing, std::function<void( labeled_sample const& )> const& on_new,
                                 uint32_t limit )
{
  std::map<uint64_t, labeled_sample const*> done;
  for ( auto const& s : existing )
    done[recipe_hash( s.actions )] = &s;
  collect_summary out;
  for ( auto const& r : collection_recipes( ctx ) )
  {
    auto const it = done.find( recipe_hash( r ) );
    if ( it != done.end() && it->second->actions == r )
    {
      out.samples.push_back( *it->second );
      ++out.reused;
      continue;
    }
    if ( out.new_evaluations == limit )
      continue;
    out.samples.push_back( label_recipe( ctx, r ) );
    ++out.new_evaluations;
    if ( on_new )
      on_new( out.samples.back() );
  }
  return out;
}

double median_label( surrogate_model const& m )
{
  if ( m.corpus_y.empty() )
    throw predictor_error( "model has no training labels" );
  auto y = m.corpus_y;
  std::sort( y.begin(), y.end() );
  auto const n = y.size();
  return n % 2u ? y[n / 2] : 0.5 * ( y[n / 2 - 1] + y[n / 2] );
}

pipeline_run run_pipeline_search( pipeline_context const& ctx, surrogate_model const& model, uint64_t seed )
{
  pipeline_run out;
  out.model = model;
  auto p = ctx.cfg.search;
  p.seed = seed;
  if ( p.pt_threshold == 0 )
    p.pt_threshold = median_label( model );
  out.threshold = p.pt_threshold;
  out.search = mcts_search( ctx.design, ctx.lib, out.model, p, [&]( recipe const& r ) { return label_recipe( ctx, r ); }, ctx.cfg.predictor );
  for ( auto const& v : out.search.validated )
  {
    if ( v.actual && ( !out.best_validated || *v.actual > *out.best_validated->actual ) )
      out.best_validated = v;
  }
  out.extracted = extract_best_recipe( out.search, ctx.cfg.extraction, p.horizon );
  return out;
}

namespace
{

/* actual pre-countermeasure scorer; repeated recipes are not re-evaluated */
struct direct_scorer
{
  pipeline_context const& ctx;
  std::map<recipe, labeled_sample> labels;
  std::vector<double> seconds;

  double operator()( recipe const& r )
  {
    auto it = labels.find( r );
    if ( it == labels.end() )
    {
      auto const t0 = clock_type::now();
      it = labels.emplace( r, label_recipe( ctx, r ) ).first;
      seconds.push_back( seconds_since( t0 ) );
    }
    return it->second.label;
  }

  direct_run finish( search_result r )
  {
    direct_run out;
    r.actual_evaluations = uint32_t( seconds.size() );
    for ( auto& b : r.best )
    {
      auto const& s = labels.at( b.actions );
      b.actual = s.label;
      b.censored = s.censored;
    }
    out.best = r.best.front();
    out.seconds_per_evaluation = mean( seconds );
    out.search = std::move( r );
    return out;
  }
};

} // namespace

direct_run sa_direct( pipeline_context const& ctx, uint32_t evaluations, uint64_t seed )
{
  direct_scorer scorer{ ctx, {}, {} };
  auto s = ctx.cfg.sa;
  s.evaluations = evaluations;
  s.horizon = ctx.cfg.search.horizon;
  return scorer.finish( sa_search( std::ref( scorer ), s, seed ) );
}

direct_run mcts_direct( pipeline_context const& ctx, uint32_t evaluations, double threshold, uint64_t seed )
{
  direct_scorer scorer{ ctx, {}, {} };
  auto p = ctx.cfg.search;
  p.iterations = evaluations;
  p.pt_threshold = threshold;
  p.seed = seed;
  return scorer.finish( mcts_search( std::ref( scorer ), p ) );
}

double surrogate_seconds( pipeline_context const& ctx, surrogate_model const& model, uint32_t samples, uint64_t seed )
{
  std::mt19937_64 rng( seed );
  std::vector<recipe> recipes;
  for ( uint32_t i = 0; i < samples; ++i )
    recipes.push_back( random_recipe( rng, ctx.cfg.search.horizon ) );
  volatile double sink = 0;
  auto const t0 = clock_type::now();
  for ( auto const& r : recipes )
    sink = sink + predict( model, recipe_features( ctx.design, ctx.lib, r ) );
  return seconds_since( t0 ) / double( samples );
}

uint64_t iterations_in_budget( double budget_seconds, double seconds_per_evaluation )
{
  if ( !( seconds_per_evaluation > 0 ) || budget_seconds <= 0 )
    return 0;
  return uint64_t( std::floor( budget_seconds / seconds_per_evaluation ) );
}

std::string evaluation_csv_header()
{
  return "label,recipe,countermeasure,pre_pt,pre_censored,post_pt,post_censored,f1,f2,f3,pre_area,pre_power,pre_delay,post_area,post_power,post_delay\n";
}

std::string evaluation_csv_row( std::string const& label, recipe_evaluation const& e )
{
  std::ostringstream os;
  os.precision( 10 );
  os << label << ',' << format_recipe( e.actions ) << ',' << countermeasure_name( e.countermeasure ) << ',' << e.pre.value_or_cap() << ',' << int( e.pre.censored() ) << ','
     << e.post.value_or_cap() << ',' << int( e.post.censored() ) << ',' << e.features.f1_overall_diversity << ',' << e.features.f2_lvt_area_pct << ','
     << e.features.f3_hvt_area_pct << ',' << e.pre_ppa.area << ',' << e.pre_ppa.static_power << ',' << e.pre_ppa.delay << ',' << e.post_ppa.area << ','
     << e.post_ppa.static_power << ',' << e.post_ppa.delay << '\n';
  return os.str();
}

std::string compare_to_csv( compare_report const& r )
{
  std::ostringstream os;
  os.precision( 10 );
  os << "method,countermeasure,recipe,pt_score,censored,area,power,delay,actual_evaluations,surrogate_evaluations,seconds_per_evaluation,iterations_in_budget,speedup\n";
  for ( auto const& row : r.rows )
  {
    os << row.method << ',' << countermeasure_name( row.countermeasure ) << ',' << format_recipe( row.actions ) << ',' << row.score.value_or_cap() << ','
       << int( row.score.censored() ) << ',' << row.ppa.area << ',' << row.ppa.static_power << ',' << row.ppa.delay << ',' << row.actual_evaluations << ','
       << row.surrogate_evaluations << ',' << row.seconds_per_evaluation << ',' << row.iterations_in_budget << ',' << row.speedup << '\n';
  }
  os << "# surrogate_seconds=" << r.surrogate_seconds << " direct_pre_seconds=" << r.direct_pre_seconds << " direct_post_seconds=" << r.direct_post_seconds
     << " monotonicity_spearman=" << r.monotonicity_spearman << " monotonicity_recipes=" << r.monotonicity_recipes
     << " monotonicity_censored=" << r.monotonicity_censored << '\n';
  return os.str();
}

} // namespace secsyn
