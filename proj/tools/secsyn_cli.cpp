#include <secsyn/pipeline.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace secsyn;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_config = 2;
constexpr int exit_verification = 3;

struct common_options
{
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common( CLI::App* sub, common_options& o )
{
  sub->add_option( "-c,--config", o.config, "JSON config file (schema 1)" );
  sub->add_option( "--set", o.overrides, "key=value override, e.g. attack.sigma=500 (repeatable)" );
  sub->add_option( "-o,--out", o.out, "output directory (overrides the config's output)" );
}

/* defaults < config file < --set overrides < dedicated flags */
experiment_config resolve( common_options const& o )
{
  auto cfg = o.config.empty() ? experiment_config{} : load_config( o.config );
  for ( auto const& s : o.overrides )
    apply_override( cfg, s );
  if ( !o.out.empty() )
    cfg.output = o.out;
  validate_config( cfg );
  return cfg;
}

std::string read_file( fs::path const& p, std::string const& what )
{
  std::ifstream in( p );
  if ( !in )
    throw config_error( "missing " + what + ": " + p.string() );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file( fs::path const& p, std::string const& text )
{
  fs::create_directories( p.parent_path() );
  auto const tmp = p.string() + ".tmp";
  {
    std::ofstream out( tmp, std::ios::binary );
    if ( !out )
      throw std::runtime_error( "cannot write " + tmp );
    out << text;
    if ( !out )
      throw std::runtime_error( "write failed: " + tmp );
  }
  fs::rename( tmp, p );
}

std::string header_value( std::string const& text, std::string const& key )
{
  if ( text.rfind( "#", 0 ) != 0 )
    return {};
  auto const line = text.substr( 0, text.find( '\n' ) );
  auto const pos = line.find( key + "=" );
  if ( pos == std::string::npos )
    return {};
  auto const start = pos + key.size() + 1;
  return line.substr( start, line.find( ' ', start ) - start );
}

class phase_timer
{
public:
  void start( std::string name )
  {
    name_ = std::move( name );
    t0_ = std::chrono::steady_clock::now();
  }
  void stop()
  {
    rows_ += name_ + "," + std::to_string( std::chrono::duration<double>( std::chrono::steady_clock::now() - t0_ ).count() ) + "\n";
  }
  void write( experiment_config const& cfg, std::string const& command ) const
  {
    write_file( fs::path( cfg.output ) / "reports" / ( "timing_" + command + ".csv" ), artifact_header( cfg ) + "phase,seconds\n" + rows_ );
  }

private:
  std::string name_;
  std::string rows_;
  std::chrono::steady_clock::time_point t0_;
};

std::vector<labeled_sample> load_dataset( experiment_config const& cfg )
{
  auto const path = fs::path( cfg.output ) / "dataset.csv";
  auto const text = read_file( path, "dataset (run collect first)" );
  auto const hash = header_value( text, "evaluation_hash" );
  if ( !hash.empty() && hash != evaluation_hash( cfg ) )
    throw config_error( "dataset " + path.string() + " was labeled under a different design/library/attack configuration" );
  return dataset_from_csv( text );
}

surrogate_model load_model( fs::path const& path )
{
  return model_from_json( read_file( path, "model (run train first)" ) );
}

std::string model_document( surrogate_model const& m, experiment_config const& cfg )
{
  auto doc = nlohmann::ordered_json::parse( model_to_json( m ) );
  doc["config_hash"] = config_hash( cfg );
  return doc.dump( 1 ) + "\n";
}

std::string pt_text( pt_score_report const& r )
{
  return r.censored() ? "CENSORED(" + std::to_string( r.cap ) + ")" : std::to_string( *r.pt_score );
}

int cmd_collect( experiment_config const& cfg, uint32_t limit )
{
  auto const ctx = make_context( cfg );
  auto const path = fs::path( cfg.output ) / "dataset.csv";
  std::vector<labeled_sample> existing;
  if ( fs::exists( path ) )
    existing = load_dataset( cfg );

  phase_timer timer;
  timer.start( "collect" );
  auto const order = collection_recipes( ctx );
  std::map<uint64_t, std::size_t> position;
  for ( std::size_t i = 0; i < order.size(); ++i )
    position[recipe_hash( order[i] )] = i;
  auto done = existing;
  auto flush = [&]() {
    auto rows = done;
    std::stable_sort( rows.begin(), rows.end(), [&]( auto const& a, auto const& b ) {
      auto const pa = position.count( recipe_hash( a.actions ) ) ? position[recipe_hash( a.actions )] : order.size();
      auto const pb = position.count( recipe_hash( b.actions ) ) ? position[recipe_hash( b.actions )] : order.size();
      return pa < pb;
    } );
    write_file( path, artifact_header( cfg ) + dataset_to_csv( rows ) );
  };
  auto const summary = collect_dataset(
      ctx, existing,
      [&]( labeled_sample const& s ) {
        done.push_back( s );
        flush();
        std::cout << "  [" << done.size() << "/" << order.size() << "] " << format_recipe( s.actions ) << " -> " << ( s.censored ? "CENSORED(" : "" )
                  << s.label << ( s.censored ? ")" : "" ) << std::endl;
      },
      limit );
  timer.stop();
  write_file( path, artifact_header( cfg ) + dataset_to_csv( summary.samples ) );
  timer.write( cfg, "collect" );

  double lo = 0, hi = 0;
  uint32_t censored = 0;
  for ( auto const& s : summary.samples )
  {
    lo = lo == 0 ? s.label : std::min( lo, s.label );
    hi = std::max( hi, s.label );
    censored += s.censored ? 1u : 0u;
  }
  std::cout << "collect: " << summary.samples.size() << " rows (" << summary.new_evaluations << " new, " << summary.reused << " reused, " << censored
            << " censored), label range " << lo << " .. " << hi << " -> " << path.string() << "\n";
  return exit_ok;
}

int cmd_train( experiment_config const& cfg )
{
  auto const data = load_dataset( cfg );
  phase_timer timer;
  timer.start( "train" );
  auto const r = train( data, cfg.predictor, cfg.predictor_seed );
  timer.stop();
  auto const& m = r.metrics;
  write_file( fs::path( cfg.output ) / "model.v1", model_document( r.model, cfg ) );
  std::ostringstream os;
  os.precision( 10 );
  os << artifact_header( cfg ) << "metric,value\n"
     << "train_samples," << m.train_samples << "\ntest_samples," << m.test_samples << "\ncensored_excluded," << m.censored_excluded << "\ntrain_rmse,"
     << m.train_rmse << "\ntest_rmse," << m.test_rmse << "\nmean_predictor_rmse," << m.mean_predictor_rmse << "\ntest_spearman," << m.test_spearman
     << "\nlabel_std," << m.label_std << "\n";
  write_file( fs::path( cfg.output ) / "reports" / "train_metrics.csv", os.str() );
  timer.write( cfg, "train" );
  std::cout << "train: " << m.train_samples << " train / " << m.test_samples << " test samples (" << m.censored_excluded << " censored excluded)\n"
            << "  test RMSE " << m.test_rmse << " (mean predictor " << m.mean_predictor_rmse << ", label std " << m.label_std << "), test Spearman "
            << m.test_spearman << "\n";
  return exit_ok;
}

int cmd_search( experiment_config const& cfg )
{
  auto const ctx = make_context( cfg );
  auto const model = load_model( fs::path( cfg.output ) / "model.v1" );
  phase_timer timer;
  timer.start( "search" );
  auto const run = run_pipeline_search( ctx, model, cfg.search.seed );
  timer.stop();
  auto const dir = fs::path( cfg.output ) / "search";
  write_file( dir / "progress.csv", artifact_header( cfg ) + progress_to_csv( run.search ) );
  write_file( dir / "model.v1", model_document( run.model, cfg ) );

  std::ostringstream os;
  os.precision( 10 );
  os << artifact_header( cfg ) << "kind,recipe,predicted_pt,actual_pt,censored\n";
  if ( run.best_validated )
  {
    auto const& b = *run.best_validated;
    os << "best_validated," << format_recipe( b.actions ) << ',' << b.predicted << ',' << *b.actual << ',' << int( b.censored ) << '\n';
  }
  os << "extracted," << format_recipe( run.extracted ) << ",,,\n";
  for ( auto const& b : run.search.best )
    os << "top_predicted," << format_recipe( b.actions ) << ',' << b.predicted << ',' << ( b.actual ? std::to_string( *b.actual ) : "" ) << ',' << int( b.censored ) << '\n';
  for ( auto const& v : run.search.validated )
    os << "validated," << format_recipe( v.actions ) << ',' << v.predicted << ',' << *v.actual << ',' << int( v.censored ) << '\n';
  write_file( dir / "top_recipes.csv", os.str() );
  timer.write( cfg, "search" );

  for ( auto const& f : run.search.evaluator_failures )
    std::cerr << "warning: validation failed: " << f << "\n";
  std::cout << "search: " << run.search.scorer_calls << " surrogate evaluations, " << run.search.actual_evaluations << " actual, "
            << run.search.fine_tune_rounds << " fine-tune rounds, threshold " << run.threshold << "\n";
  if ( run.best_validated )
    std::cout << "  best validated: " << format_recipe( run.best_validated->actions ) << " pt_score " << *run.best_validated->actual
              << ( run.best_validated->censored ? " (censored)" : "" ) << "\n";
  std::cout << "  extracted: " << format_recipe( run.extracted ) << "\n";
  return run.search.evaluator_failures.empty() ? exit_ok : exit_verification;
}

recipe chosen_recipe( experiment_config const& cfg, std::string const& text )
{
  if ( !text.empty() )
  {
    try
    {
      auto r = parse_recipe( text );
      validate_recipe( r, cfg.search.horizon );
      return r;
    }
    catch ( recipe_error const& e )
    {
      throw config_error( e.what() );
    }
  }
  auto const top = fs::path( cfg.output ) / "search" / "top_recipes.csv";
  if ( !fs::exists( top ) )
    return compress2rs_like_recipe();
  std::istringstream in( read_file( top, "search results" ) );
  std::string line;
  while ( std::getline( in, line ) )
  {
    if ( line.rfind( "best_validated,", 0 ) == 0 || line.rfind( "extracted,", 0 ) == 0 )
    {
      auto const start = line.find( ',' ) + 1;
      return parse_recipe( line.substr( start, line.find( ',', start ) - start ) );
    }
  }
  throw config_error( top.string() + " has no recipe" );
}

int cmd_validate( experiment_config const& cfg, std::string const& recipe_text )
{
  auto const ctx = make_context( cfg );
  auto const r = chosen_recipe( cfg, recipe_text );
  phase_timer timer;
  timer.start( "validate_recipe" );
  auto const e = evaluate_recipe( ctx, r, cfg.countermeasure );
  timer.stop();
  timer.start( "validate_baseline" );
  auto const base = evaluate_recipe( ctx, compress2rs_like_recipe(), cfg.countermeasure );
  timer.stop();
  write_file( fs::path( cfg.output ) / "reports" / "validate.csv",
              artifact_header( cfg ) + evaluation_csv_header() + evaluation_csv_row( "recipe", e ) + evaluation_csv_row( "baseline", base ) );
  timer.write( cfg, "validate" );
  for ( auto const* x : { &e, &base } )
  {
    std::cout << ( x == &e ? "recipe  " : "baseline" ) << " " << format_recipe( x->actions ) << "\n  pre " << pt_text( x->pre ) << "  post("
              << countermeasure_name( cfg.countermeasure ) << ") " << pt_text( x->post ) << "  area " << x->post_ppa.area << "  power "
              << x->post_ppa.static_power << "  delay " << x->post_ppa.delay << "\n";
  }
  return exit_ok;
}

int cmd_attack( experiment_config const& cfg, std::string const& recipe_text )
{
  auto const ctx = make_context( cfg );
  auto const r = recipe_text.empty() ? compress2rs_like_recipe() : chosen_recipe( cfg, recipe_text );
  phase_timer timer;
  timer.start( "attack" );
  auto const d = protect( ctx, make_target( ctx, synthesize( ctx, r ) ), cfg.countermeasure );
  auto const rep = attack( ctx, d );
  timer.stop();
  write_file( fs::path( cfg.output ) / "reports" / "attack.csv", artifact_header( cfg ) + "# recipe=" + format_recipe( r ) + " countermeasure=" +
                                                                  countermeasure_name( cfg.countermeasure ) + "\n" + report_to_csv( rep ) );
  timer.write( cfg, "attack" );
  std::cout << "attack: " << format_recipe( r ) << " (" << countermeasure_name( cfg.countermeasure ) << ", sigma " << cfg.attack.sigma << ") pt_score "
            << pt_text( rep ) << "\n";
  return exit_ok;
}

int cmd_compare( experiment_config const& cfg )
{
  auto const ctx = make_context( cfg );
  auto const data = load_dataset( cfg );
  auto const model = load_model( fs::path( cfg.output ) / "model.v1" );
  phase_timer timer;
  timer.start( "compare" );
  auto const rep = run_compare( ctx, model, data, []( std::string const& s ) { std::cout << "  " << s << std::endl; } );
  timer.stop();
  write_file( fs::path( cfg.output ) / "reports" / "compare.csv", artifact_header( cfg ) + compare_to_csv( rep ) );
  timer.write( cfg, "compare" );

  std::printf( "%-12s %-9s %14s %10s %10s %8s %8s %12s %9s\n", "method", "cm", "pt_score", "area", "power", "delay", "actual", "iter/budget", "speedup" );
  for ( auto const& row : rep.rows )
  {
    std::printf( "%-12s %-9s %14s %10.1f %10.1f %8.2f %8u %12llu %9.1f\n", row.method.c_str(), countermeasure_name( row.countermeasure ), pt_text( row.score ).c_str(),
                 row.ppa.area, row.ppa.static_power, row.ppa.delay, row.actual_evaluations, static_cast<unsigned long long>( row.iterations_in_budget ),
                 row.speedup );
  }
  std::printf( "surrogate %.4fs/eval, direct pre %.3fs/eval, direct post %.3fs/eval (ratio %.1fx)\n", rep.surrogate_seconds, rep.direct_pre_seconds,
               rep.direct_post_seconds, rep.surrogate_seconds > 0 ? rep.direct_post_seconds / rep.surrogate_seconds : 0.0 );
  std::printf( "pre/post Spearman over %u recipes: %.3f (%u censored after the countermeasure)\n", rep.monotonicity_recipes, rep.monotonicity_spearman,
               rep.monotonicity_censored );
  return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Security-first logic synthesis: dataset collection, surrogate training, MCTS recipe search and power-attack validation" };
  app.require_subcommand( 1 );
  common_options common;
  uint32_t limit = std::numeric_limits<uint32_t>::max();
  std::string recipe_text;

  auto* collect = app.add_subcommand( "collect", "label synthesis recipes with their pre-countermeasure pt_score" );
  add_common( collect, common );
  collect->add_option( "--limit", limit, "stop after this many new evaluations" );
  auto* train_cmd = app.add_subcommand( "train", "fit the surrogate on out/dataset.csv" );
  add_common( train_cmd, common );
  auto* search = app.add_subcommand( "search", "surrogate-guided MCTS with fine-tuning" );
  add_common( search, common );
  auto* validate = app.add_subcommand( "validate", "synthesize, protect and attack a recipe against the baseline" );
  add_common( validate, common );
  validate->add_option( "-r,--recipe", recipe_text, "recipe, e.g. \"b; rw; rf\" (default: best search result)" );
  auto* attack_cmd = app.add_subcommand( "attack", "pt_score of one recipe under the configured countermeasure" );
  add_common( attack_cmd, common );
  attack_cmd->add_option( "-r,--recipe", recipe_text, "recipe (default: the compress2rs-like baseline)" );
  auto* compare = app.add_subcommand( "compare", "baseline, SA-direct, MCTS-direct and pipeline comparison table" );
  add_common( compare, common );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return exit_config;
  }

  try
  {
    auto const cfg = resolve( common );
    if ( collect->parsed() )
      return cmd_collect( cfg, limit );
    if ( train_cmd->parsed() )
      return cmd_train( cfg );
    if ( search->parsed() )
      return cmd_search( cfg );
    if ( validate->parsed() )
      return cmd_validate( cfg, recipe_text );
    if ( attack_cmd->parsed() )
      return cmd_attack( cfg, recipe_text );
    return cmd_compare( cfg );
  }
  catch ( config_error const& e )
  {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  catch ( recipe_error const& e )
  {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  catch ( predictor_error const& e )
  {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  catch ( verification_error const& e )
  {
    std::cerr << "verification failure: " << e.what() << "\n";
    return exit_verification;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
}
