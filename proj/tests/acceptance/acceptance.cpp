/* Acceptance suite: runs every criterion and prints one PASS/FAIL line per criterion. */

#include <secsyn/pipeline.hpp>
#include <secsyn/simulation.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace secsyn;

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since( clock_type::time_point t0 )
{
  return std::chrono::duration<double>( clock_type::now() - t0 ).count();
}

struct outcome
{
  bool pass{ false };
  std::string detail;
};

std::string fmt( char const* f, auto... args )
{
  char buf[1024];
  std::snprintf( buf, sizeof( buf ), f, args... );
  return buf;
}

void progress( std::string const& s )
{
  std::cerr << "    " << s << std::endl;
}

recipe random_recipe( std::mt19937_64& rng )
{
  recipe r( default_horizon );
  for ( auto& a : r )
    a = action_id( rng() % num_actions() );
  return r;
}

/* state shared between criteria */
struct suite
{
  pipeline_context ctx;
  fs::path work;
  fs::path benchmarks;
  std::vector<labeled_sample> dataset;
  std::optional<training_result> model;
  std::optional<pt_score_report> baseline_pre;
  std::vector<double> post_seconds;
  std::vector<double> pre_seconds;

  std::vector<labeled_sample> const& data()
  {
    if ( !dataset.empty() )
      return dataset;
    auto const path = work / "dataset.csv";
    std::vector<labeled_sample> existing;
    if ( fs::exists( path ) )
    {
      std::ifstream in( path );
      std::stringstream ss;
      ss << in.rdbuf();
      auto const text = ss.str();
      if ( text.find( "evaluation_hash=" + evaluation_hash( ctx.cfg ) ) != std::string::npos )
        existing = dataset_from_csv( text );
    }
    uint32_t n = uint32_t( existing.size() );
    auto const summary = collect_dataset( ctx, existing, [&]( labeled_sample const& s ) {
      ++n;
      if ( n % 20u == 0u )
        progress( fmt( "collected %u/%u (last label %.0f)", n, ctx.cfg.collect.samples, s.label ) );
    } );
    fs::create_directories( work );
    std::ofstream( path ) << artifact_header( ctx.cfg ) << dataset_to_csv( summary.samples );
    progress( fmt( "dataset: %zu rows, %u new evaluations", summary.samples.size(), summary.new_evaluations ) );
    dataset = summary.samples;
    return dataset;
  }

  training_result const& trained()
  {
    if ( !model )
      model = train( data(), ctx.cfg.predictor, ctx.cfg.predictor_seed );
    return *model;
  }

  pt_score_report const& baseline()
  {
    if ( !baseline_pre )
      baseline_pre = attack( ctx, make_target( ctx, synthesize( ctx, compress2rs_like_recipe() ) ) );
    return *baseline_pre;
  }
};

/* 1: functionality preservation */
outcome functionality( suite& s )
{
  std::vector<std::pair<std::string, aig>> designs;
  for ( auto const& e : fs::directory_iterator( s.benchmarks ) )
  {
    if ( e.path().extension() == ".aag" )
      designs.emplace_back( e.path().filename().string(), read_aiger_file( e.path().string() ) );
  }
  std::sort( designs.begin(), designs.end(), []( auto const& a, auto const& b ) { return a.first < b.first; } );
  designs.emplace_back( "aes-byte", s.ctx.design );

  uint32_t checks = 0, failures = 0;
  std::string first_failure;
  auto record = [&]( bool ok, std::string const& what ) {
    ++checks;
    if ( !ok )
    {
      ++failures;
      if ( first_failure.empty() )
        first_failure = what;
    }
  };
  std::mt19937_64 rng( 2024 );
  for ( auto const& [name, g] : designs )
  {
    if ( g.num_inputs() > 12u )
      return { false, name + " has more than 12 inputs" };
    for ( action_id a = 0; a < num_actions(); ++a )
      record( equivalent( g, apply_action( g, a ) ).outcome == equivalence_result::verdict::equal, name + " action " + action_set()[a].name );
    for ( int i = 0; i < 20; ++i )
    {
      auto const r = random_recipe( rng );
      auto const h = apply_recipe( g, r );
      auto const what = name + " recipe " + format_recipe( r );
      record( equivalent( g, h ).outcome == equivalence_result::verdict::equal, what );
      auto const n = map_aig( h, s.ctx.lib );
      record( equivalent( g, to_aig( n ) ).outcome == equivalence_result::verdict::equal, what + " (mapped)" );
      record( verify_countermeasure( n, apply_elb( n, s.ctx.lib ) ).outcome == equivalence_result::verdict::equal, what + " (elb)" );
      if ( name == "aes-byte" )
      {
        auto const d = make_target( s.ctx, n );
        record( verify_countermeasure( d, apply_elb( d, s.ctx.lib ) ).equal, what + " (elb design)" );
        record( verify_countermeasure( d, apply_quadseal( d, s.ctx.lib ) ).equal, what + " (quadseal)" );
      }
      else
      {
        /* the QuadSeal building block: the dual computes ~f(~x) */
        auto const dual = dual_netlist( n );
        bool ok = true;
        for ( uint64_t m = 0; ok && m < ( 1ull << n.num_inputs() ); ++m )
        {
          std::vector<bool> in( n.num_inputs() ), nin( n.num_inputs() );
          for ( uint32_t b = 0; b < n.num_inputs(); ++b )
          {
            in[b] = ( m >> b ) & 1u;
            nin[b] = !in[b];
          }
          auto const f = simulate( n, in );
          auto const fd = simulate( dual, nin );
          for ( std::size_t o = 0; o < f.size(); ++o )
            ok = ok && fd[o] == !f[o];
        }
        record( ok, what + " (quadseal dual)" );
      }
    }
  }
  return { failures == 0u, fmt( "%u designs, %u exhaustive checks, %u failures%s", uint32_t( designs.size() ), checks, failures,
                                first_failure.empty() ? "" : ( " (first: " + first_failure + ")" ).c_str() ) };
}

/* 2: attack validity */
outcome attack_validity( suite& s )
{
  std::vector<uint8_t> pts( 256 );
  for ( uint32_t i = 0; i < 256u; ++i )
    pts[i] = uint8_t( i );
  auto const key = s.ctx.cfg.design.key;
  uint32_t worst = 0;
  for ( auto const* which : { "raw", "baseline" } )
  {
    auto const n = std::string( which ) == "raw" ? map_aig( s.ctx.design, s.ctx.lib ) : synthesize( s.ctx, compress2rs_like_recipe() );
    auto const t = simulate_traces( make_target( s.ctx, n ), s.ctx.lib, pts, 0.0, 1 );
    worst = std::max( worst, cpa_attack( t ).rank_of( key ) );
  }
  auto const& r = s.baseline();
  auto const ok = worst == 1u && !r.censored() && r.trials == 128u && r.target_rate == 0.9;
  return { ok, fmt( "sigma 0: worst correct-key rank %u; sigma %.0f: baseline pt_score %s (%u trials, target %.2f)", worst, s.ctx.cfg.attack.sigma,
                    r.censored() ? "CENSORED" : std::to_string( *r.pt_score ).c_str(), r.trials, r.target_rate ) };
}

/* 3: countermeasure ordering */
outcome countermeasure_ordering( suite& s )
{
  auto const d = make_target( s.ctx, synthesize( s.ctx, compress2rs_like_recipe() ) );
  auto const none = double( s.baseline().value_or_cap() );
  progress( "elb" );
  auto const elb = attack( s.ctx, protect( s.ctx, d, countermeasure_kind::elb ) );
  progress( "quadseal" );
  auto const quad = attack( s.ctx, protect( s.ctx, d, countermeasure_kind::quadseal ) );
  auto const e = double( elb.value_or_cap() ), q = double( quad.value_or_cap() );
  auto const ok = none < q && none < e && e / none >= 3.0;
  return { ok, fmt( "none %.0f, elb %s%.0f%s, quadseal %s%.0f%s, elb/none %.2f", none, elb.censored() ? ">=" : "", e, "", quad.censored() ? ">=" : "", q,
                    quad.censored() ? " (censored at the cap)" : "", e / none ) };
}

/* 4: pre/post monotonicity */
outcome monotonicity( suite& s )
{
  auto const& data = s.data();
  auto const n = s.ctx.cfg.compare.monotonicity_recipes;
  std::vector<double> pre, post;
  uint32_t censored = 0;
  for ( uint32_t i = 0; i < n && i < data.size(); ++i )
  {
    auto const d = protect( s.ctx, make_target( s.ctx, synthesize( s.ctx, data[i].actions ) ), countermeasure_kind::elb );
    auto const t0 = clock_type::now();
    auto const r = attack( s.ctx, d );
    s.post_seconds.push_back( seconds_since( t0 ) );
    pre.push_back( data[i].label );
    post.push_back( double( r.value_or_cap() ) );
    censored += r.censored() ? 1u : 0u;
    progress( fmt( "recipe %u: pre %.0f post %s%.0f (%.1f s)", i + 1, data[i].label, r.censored() ? "CENSORED " : "", post.back(), s.post_seconds.back() ) );
  }
  auto const rho = spearman( pre, post );
  return { pre.size() >= 20u && rho >= 0.8, fmt( "Spearman %.3f over %zu random recipes (%u censored at the cap after ELB)", rho, pre.size(), censored ) };
}

/* 5: predictor floor */
outcome predictor_floor( suite& s )
{
  auto const& data = s.data();
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for ( auto const& x : data )
  {
    lo = std::min( lo, x.label );
    hi = std::max( hi, x.label );
  }
  auto const& m = s.trained().metrics;
  auto const ok = data.size() >= 200u && m.test_rmse < 0.9 * m.mean_predictor_rmse && m.test_spearman > 0.5;
  return { ok, fmt( "%zu samples (label spread %.1fx), %zu/%zu split, test RMSE %.1f vs mean predictor %.1f (ratio %.3f), Spearman %.3f", data.size(), hi / lo,
                    m.train_samples, m.test_samples, m.test_rmse, m.mean_predictor_rmse, m.test_rmse / m.mean_predictor_rmse, m.test_spearman ) };
}

double mean( std::vector<double> const& v )
{
  double t = 0;
  for ( auto x : v )
    t += x;
  return v.empty() ? 0.0 : t / double( v.size() );
}

/* 6: surrogate speedup */
outcome speedup( suite& s )
{
  if ( s.post_seconds.empty() )
    monotonicity( s );
  auto const& model = s.trained().model;
  auto const surrogate = surrogate_seconds( s.ctx, model, s.ctx.cfg.compare.timing_samples, s.ctx.cfg.compare.seed );
  auto const direct = mean( s.post_seconds );
  auto const pre = s.pre_seconds.empty() ? 0.0 : mean( s.pre_seconds );
  auto const budget = s.ctx.cfg.compare.budget_seconds;
  auto const actual = 2u * s.ctx.cfg.search.k * ( s.ctx.cfg.search.iterations / s.ctx.cfg.search.fine_tune_interval );
  auto const pipeline_iterations = iterations_in_budget( budget - double( actual ) * pre, surrogate );
  auto const direct_iterations = iterations_in_budget( budget, direct );
  auto const per_eval = direct / surrogate;
  auto const accounting = direct_iterations ? double( pipeline_iterations ) / double( direct_iterations ) : 0.0;
  return { per_eval >= 100.0 && accounting >= 100.0,
           fmt( "surrogate %.4f s/eval vs direct post-ELB pt_score %.2f s/eval: %.1fx; 600 s budget: %llu vs %llu iterations (%.1fx); pre-only direct %.2f s/eval "
                "(%.1fx)",
                surrogate, direct, per_eval, static_cast<unsigned long long>( pipeline_iterations ), static_cast<unsigned long long>( direct_iterations ), accounting,
                pre, pre / surrogate ) };
}

/* 7: search-quality ordering */
outcome search_ordering( suite& s )
{
  auto const& model = s.trained().model;
  auto const base = double( s.baseline().value_or_cap() );
  uint32_t pipeline_ge_sa = 0, pipeline_gt_base = 0, sa_gt_base = 0;
  std::string rows;
  for ( uint64_t seed = 1; seed <= 5u; ++seed )
  {
    auto const run = run_pipeline_search( s.ctx, model, seed );
    auto const sa = sa_direct( s.ctx, s.ctx.cfg.compare.direct_evaluations, seed );
    for ( uint32_t i = 0; i < sa.search.actual_evaluations; ++i )
      s.pre_seconds.push_back( sa.seconds_per_evaluation );
    auto const p = run.best_validated ? *run.best_validated->actual : 0.0;
    auto const q = *sa.best.actual;
    pipeline_ge_sa += p >= q ? 1u : 0u;
    pipeline_gt_base += p > base ? 1u : 0u;
    sa_gt_base += q > base ? 1u : 0u;
    rows += fmt( " %.0f/%.0f", p, q );
    progress( fmt( "seed %llu: pipeline %.0f (%u actual evaluations), SA-direct %.0f (%u actual), baseline %.0f", static_cast<unsigned long long>( seed ), p,
                   run.search.actual_evaluations, q, sa.search.actual_evaluations, base ) );
    if ( run.search.actual_evaluations != s.ctx.cfg.compare.direct_evaluations )
      return { false, fmt( "pipeline used %u actual evaluations, expected %u", run.search.actual_evaluations, s.ctx.cfg.compare.direct_evaluations ) };
  }
  auto const ok = pipeline_ge_sa >= 3u && pipeline_gt_base >= 4u && sa_gt_base >= 4u;
  return { ok, fmt( "pipeline >= SA on %u/5 seeds, pipeline > baseline %u/5, SA > baseline %u/5 (pipeline/SA:%s; baseline %.0f)", pipeline_ge_sa, pipeline_gt_base,
                    sa_gt_base, rows.c_str(), base ) };
}

/* 8: exact-arithmetic units */
outcome exact_arithmetic( suite& )
{
  std::vector<std::string> failed;
  auto check = [&]( bool ok, char const* what ) {
    if ( !ok )
      failed.push_back( what );
  };
  /* the example's c = 1.414 is sqrt(2) rounded; at c = 1.414 exactly the value is 3.13453 */
  check( std::fabs( uct_score( 10, 5, 25, std::sqrt( 2.0 ) ) - 3.1347 ) <= 1e-4, "uct example" );
  check( uct_score( 10, 5, 25, 1.414 ) == 10.0 / 5.0 + 1.414 * std::sqrt( std::log( 25.0 ) / 5.0 ), "uct closed form" );
  check( std::isinf( uct_score( 0, 0, 7, 1.0 ) ), "uct unvisited" );
  check( normalize_reward( 500, 1000 ) == 0.0, "reward below threshold" );
  check( normalize_reward( 1000, 1000 ) == 0.0, "reward at threshold" );
  check( normalize_reward( 2000, 1000 ) == 2.0, "reward above threshold" );
  check( pearson( { 1, 2, 3 }, { 2, 4, 6 } ) == 1.0, "pearson perfect" );
  check( pearson( { 1, 2, 3 }, { 3, 2, 1 } ) == -1.0, "pearson inverse" );
  check( std::fabs( pearson( { 1, 2, 3 }, { 1, 2, 4 } ) - 9.0 / std::sqrt( 84.0 ) ) < 1e-15, "pearson closed form" );
  check( rmse( { 1, 2 }, { 2, 4 } ) == std::sqrt( 2.5 ), "rmse closed form" );
  check( rmse( { 0 }, { 3 } ) == 3.0, "rmse single" );
  bool hw = true;
  for ( uint32_t b = 0; b < 256u; ++b )
  {
    uint32_t ones = 0;
    for ( uint32_t i = 0; i < 8u; ++i )
      ones += ( b >> i ) & 1u;
    hw = hw && hamming_weight( uint8_t( b ) ) == ones;
  }
  check( hw, "hamming weights" );
  std::string names;
  for ( auto const& f : failed )
    names += " " + f;
  return { failed.empty(), failed.empty() ? fmt( "UCT %.6f (c = sqrt 2) and %.6f (c = 1.414), reward branches, Pearson, RMSE and all 256 Hamming weights exact",
                                                  uct_score( 10, 5, 25, std::sqrt( 2.0 ) ), uct_score( 10, 5, 25, 1.414 ) )
                                           : "failed:" + names };
}

/* 9: delayed reward and conservation */
outcome search_invariants( suite& s )
{
  std::vector<std::pair<std::string, search_result>> runs;
  auto const& model = s.trained().model;
  {
    auto m = model;
    auto p = s.ctx.cfg.search;
    p.iterations = 500;
    p.pt_threshold = median_label( model );
    progress( "500-iteration surrogate search" );
    runs.emplace_back( "surrogate", mcts_search( s.ctx.design, s.ctx.lib, m, p, {} ) );
  }
  for ( uint64_t seed = 1; seed <= 4u; ++seed )
  {
    search_params p;
    p.iterations = 500;
    p.pt_threshold = 30;
    p.seed = seed;
    auto scorer = [seed]( recipe const& r ) {
      double v = 0;
      for ( std::size_t i = 0; i < r.size(); ++i )
        v += double( ( r[i] * 7u + i * seed ) % 5u );
      return v;
    };
    runs.emplace_back( fmt( "synthetic seed %llu", static_cast<unsigned long long>( seed ) ), mcts_search( scorer, p ) );
  }
  uint32_t violations = 0, nodes = 0, rewarded = 0;
  for ( auto const& [name, r] : runs )
  {
    auto const horizon = r.log.empty() ? 0u : uint32_t( r.log.front().actions.size() );
    violations += r.tree[0].visits == 500u ? 0u : 1u;
    std::vector<double> reward( r.tree.size(), 0.0 );
    for ( auto const& v : r.log )
    {
      /* the only reward source is the terminal state of a complete recipe */
      violations += v.actions.size() == horizon ? 0u : 1u;
      rewarded += v.reward > 0 ? 1u : 0u;
      for ( auto id : v.path )
        reward[id] += v.reward;
    }
    for ( std::size_t id = 0; id < r.tree.size(); ++id )
    {
      auto const& n = r.tree[id];
      ++nodes;
      uint32_t child_visits = 0;
      for ( auto c : n.children )
        child_visits += c >= 0 ? r.tree[c].visits : 0u;
      violations += child_visits <= n.visits ? 0u : 1u;
      violations += std::fabs( n.reward - reward[id] ) <= 1e-9 * std::max( 1.0, reward[id] ) ? 0u : 1u;
    }
  }
  return { violations == 0u && rewarded > 0u,
           fmt( "%zu searches of 500 iterations, %u nodes, %u rewarded rollouts, %u invariant violations", runs.size(), nodes, rewarded, violations ) };
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "acceptance suite" };
  std::string config = SECSYN_DEFAULT_CONFIG;
  std::string work = "acceptance_out";
  std::string benchmarks = SECSYN_BENCHMARK_DIR;
  std::vector<int> only;
  app.add_option( "--config", config, "experiment config" );
  app.add_option( "--work", work, "directory for the cached dataset" );
  app.add_option( "--benchmarks", benchmarks, "AIGER benchmark directory" );
  app.add_option( "--only", only, "run only these criteria" );
  CLI11_PARSE( app, argc, argv );

  suite s{ make_context( load_config( config ) ), work, benchmarks, {}, {}, {}, {}, {} };

  struct criterion
  {
    int id;
    char const* name;
    outcome ( *run )( suite& );
  };
  /* the dataset-dependent criteria share the collected samples and the trained model */
  std::vector<criterion> const criteria{ { 1, "functionality preservation", functionality },
                                         { 2, "attack validity", attack_validity },
                                         { 3, "countermeasure ordering", countermeasure_ordering },
                                         { 5, "predictor floor", predictor_floor },
                                         { 4, "pre/post monotonicity", monotonicity },
                                         { 7, "search-quality ordering", search_ordering },
                                         { 6, "surrogate speedup", speedup },
                                         { 8, "exact-arithmetic units", exact_arithmetic },
                                         { 9, "delayed-reward and conservation invariants", search_invariants } };

  std::map<int, std::string> lines;
  bool all = true;
  for ( auto const& c : criteria )
  {
    if ( !only.empty() && std::find( only.begin(), only.end(), c.id ) == only.end() )
      continue;
    std::cerr << "criterion " << c.id << ": " << c.name << std::endl;
    auto const t0 = clock_type::now();
    outcome o;
    try
    {
      o = c.run( s );
    }
    catch ( std::exception const& e )
    {
      o = { false, std::string( "exception: " ) + e.what() };
    }
    all = all && o.pass;
    lines[c.id] = fmt( "%s criterion %d (%s): %s [%.1f s]", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds_since( t0 ) );
    std::cout << lines[c.id] << std::endl;
  }
  std::cout << "\nsummary\n";
  for ( auto const& [id, line] : lines )
    std::cout << line << "\n";
  return all ? 0 : 1;
}
