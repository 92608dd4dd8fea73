#include <secsyn/pipeline.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace secsyn
{

using nlohmann::ordered_json;

namespace
{

char const* sbox_name( sbox_style s )
{
  return s == sbox_style::table ? "table" : "tower";
}

sbox_style parse_sbox( std::string const& name )
{
  if ( name == "table" )
    return sbox_style::table;
  if ( name == "tower" )
    return sbox_style::tower;
  throw config_error( "design.sbox: unknown style '" + name + "' (expected table or tower)" );
}

char const* extraction_name( extraction_policy p )
{
  return p == extraction_policy::most_visited ? "most_visited" : "most_rewarding";
}

ordered_json to_doc( experiment_config const& c )
{
  ordered_json j;
  j["schema"] = config_schema;
  j["design"] = { { "source", c.design.source }, { "key", c.design.key }, { "sbox", sbox_name( c.design.sbox ) }, { "capture_loads", c.design.capture_loads } };
  j["library"] = { { "seed", c.library.seed },
                   { "leakage_scale", c.library.leakage_scale },
                   { "delay_scale", c.library.delay_scale },
                   { "alpha", c.library.alpha },
                   { "jitter", c.library.jitter },
                   { "instance_variation", c.library.instance_variation } };
  auto const& a = c.attack;
  j["attack"] = { { "sigma", a.sigma },
                  { "cap", a.cap },
                  { "first_count", a.first_count },
                  { "coarse_factor", a.coarse_factor },
                  { "trials_coarse", a.trials_coarse },
                  { "trials", a.trials },
                  { "thorough_steps", a.thorough_steps },
                  { "target_rate", a.target_rate },
                  { "seed", a.seed } };
  j["countermeasure"] = countermeasure_name( c.countermeasure );
  j["collect"] = { { "samples", c.collect.samples }, { "sa_fraction", c.collect.sa_fraction }, { "sa_evaluations", c.collect.sa_evaluations }, { "seed", c.collect.seed } };
  auto const& p = c.predictor;
  j["predictor"] = { { "trees", p.trees },
                     { "depth", p.depth },
                     { "learning_rate", p.learning_rate },
                     { "min_leaf", p.min_leaf },
                     { "extra_trees", p.extra_trees },
                     { "test_fraction", p.test_fraction },
                     { "seed", c.predictor_seed } };
  auto const& s = c.search;
  j["search"] = { { "horizon", s.horizon },
                  { "c", s.c },
                  { "pt_threshold", s.pt_threshold },
                  { "iterations", s.iterations },
                  { "fine_tune_interval", s.fine_tune_interval },
                  { "k", s.k },
                  { "seed", s.seed },
                  { "extraction", extraction_name( c.extraction ) } };
  j["sa"] = { { "initial_temperature", c.sa.initial_temperature }, { "cooling", c.sa.cooling }, { "restart_interval", c.sa.restart_interval } };
  j["compare"] = { { "direct_evaluations", c.compare.direct_evaluations },
                   { "budget_seconds", c.compare.budget_seconds },
                   { "monotonicity_recipes", c.compare.monotonicity_recipes },
                   { "timing_samples", c.compare.timing_samples },
                   { "seed", c.compare.seed } };
  j["output"] = c.output;
  return j;
}

experiment_config from_doc( ordered_json const& j )
{
  experiment_config c;
  auto const key = j.at( "design" ).at( "key" ).get<uint32_t>();
  if ( key > 255u )
    throw config_error( "design.key must be a byte" );
  c.design.source = j.at( "design" ).at( "source" ).get<std::string>();
  c.design.key = uint8_t( key );
  c.design.sbox = parse_sbox( j.at( "design" ).at( "sbox" ).get<std::string>() );
  c.design.capture_loads = j.at( "design" ).at( "capture_loads" ).get<uint32_t>();

  auto const& l = j.at( "library" );
  c.library.seed = l.at( "seed" ).get<uint64_t>();
  c.library.leakage_scale = l.at( "leakage_scale" ).get<decltype( c.library.leakage_scale )>();
  c.library.delay_scale = l.at( "delay_scale" ).get<decltype( c.library.delay_scale )>();
  c.library.alpha = l.at( "alpha" ).get<double>();
  c.library.jitter = l.at( "jitter" ).get<double>();
  c.library.instance_variation = l.at( "instance_variation" ).get<double>();

  auto const& a = j.at( "attack" );
  c.attack.sigma = a.at( "sigma" ).get<double>();
  c.attack.cap = a.at( "cap" ).get<uint32_t>();
  c.attack.first_count = a.at( "first_count" ).get<uint32_t>();
  c.attack.coarse_factor = a.at( "coarse_factor" ).get<double>();
  c.attack.trials_coarse = a.at( "trials_coarse" ).get<uint32_t>();
  c.attack.trials = a.at( "trials" ).get<uint32_t>();
  c.attack.thorough_steps = a.at( "thorough_steps" ).get<uint32_t>();
  c.attack.target_rate = a.at( "target_rate" ).get<double>();
  c.attack.seed = a.at( "seed" ).get<uint64_t>();

  try
  {
    c.countermeasure = parse_countermeasure( j.at( "countermeasure" ).get<std::string>() );
  }
  catch ( design_error const& e )
  {
    throw config_error( std::string( "countermeasure: " ) + e.what() );
  }

  auto const& col = j.at( "collect" );
  c.collect.samples = col.at( "samples" ).get<uint32_t>();
  c.collect.sa_fraction = col.at( "sa_fraction" ).get<double>();
  c.collect.sa_evaluations = col.at( "sa_evaluations" ).get<uint32_t>();
  c.collect.seed = col.at( "seed" ).get<uint64_t>();

  auto const& p = j.at( "predictor" );
  c.predictor.trees = p.at( "trees" ).get<uint32_t>();
  c.predictor.depth = p.at( "depth" ).get<uint32_t>();
  c.predictor.learning_rate = p.at( "learning_rate" ).get<double>();
  c.predictor.min_leaf = p.at( "min_leaf" ).get<uint32_t>();
  c.predictor.extra_trees = p.at( "extra_trees" ).get<uint32_t>();
  c.predictor.test_fraction = p.at( "test_fraction" ).get<double>();
  c.predictor_seed = p.at( "seed" ).get<uint64_t>();

  auto const& s = j.at( "search" );
  c.search.horizon = s.at( "horizon" ).get<uint32_t>();
  c.search.c = s.at( "c" ).get<double>();
  c.search.pt_threshold = s.at( "pt_threshold" ).get<double>();
  c.search.iterations = s.at( "iterations" ).get<uint32_t>();
  c.search.fine_tune_interval = s.at( "fine_tune_interval" ).get<uint32_t>();
  c.search.k = s.at( "k" ).get<uint32_t>();
  c.search.seed = s.at( "seed" ).get<uint64_t>();
  try
  {
    c.extraction = parse_extraction_policy( s.at( "extraction" ).get<std::string>() );
  }
  catch ( search_error const& e )
  {
    throw config_error( std::string( "search.extraction: " ) + e.what() );
  }

  auto const& sa = j.at( "sa" );
  c.sa.initial_temperature = sa.at( "initial_temperature" ).get<double>();
  c.sa.cooling = sa.at( "cooling" ).get<double>();
  c.sa.restart_interval = sa.at( "restart_interval" ).get<uint32_t>();
  c.sa.horizon = c.search.horizon;

  auto const& cmp = j.at( "compare" );
  c.compare.direct_evaluations = cmp.at( "direct_evaluations" ).get<uint32_t>();
  c.compare.budget_seconds = cmp.at( "budget_seconds" ).get<double>();
  c.compare.monotonicity_recipes = cmp.at( "monotonicity_recipes" ).get<uint32_t>();
  c.compare.timing_samples = cmp.at( "timing_samples" ).get<uint32_t>();
  c.compare.seed = cmp.at( "seed" ).get<uint64_t>();

  c.output = j.at( "output" ).get<std::string>();
  return c;
}

/* overlays `user` on `base`; every user key must exist in the defaults */
void merge_into( ordered_json& base, ordered_json const& user, std::string const& prefix )
{
  if ( !user.is_object() )
    throw config_error( ( prefix.empty() ? std::string( "config" ) : prefix ) + ": expected an object" );
  for ( auto const& [k, v] : user.items() )
  {
    auto const path = prefix.empty() ? k : prefix + "." + k;
    if ( !base.contains( k ) )
      throw config_error( "unknown config key '" + path + "'" );
    if ( base[k].is_object() )
      merge_into( base[k], v, path );
    else
      base[k] = v;
  }
}

experiment_config checked_from_doc( ordered_json const& j )
{
  experiment_config c;
  try
  {
    c = from_doc( j );
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw config_error( std::string( "config value of the wrong type: " ) + e.what() );
  }
  validate_config( c );
  return c;
}

std::string fnv1a_hex( std::string const& text )
{
  uint64_t h = 0xcbf29ce484222325ULL;
  for ( unsigned char ch : text )
  {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf( buf, sizeof( buf ), "%016llx", static_cast<unsigned long long>( h ) );
  return buf;
}

} // namespace

std::string config_to_json( experiment_config const& cfg )
{
  return to_doc( cfg ).dump( 2 ) + "\n";
}

experiment_config config_from_json( std::string const& text )
{
  ordered_json user;
  try
  {
    user = ordered_json::parse( text );
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw config_error( std::string( "config is not valid JSON: " ) + e.what() );
  }
  if ( !user.is_object() )
    throw config_error( "config: expected an object" );
  if ( !user.contains( "schema" ) )
    throw config_error( "config: missing \"schema\" (expected 1)" );
  if ( user["schema"] != config_schema )
    throw config_error( "config: unsupported schema " + user["schema"].dump() + " (expected 1)" );
  auto doc = to_doc( {} );
  merge_into( doc, user, "" );
  return checked_from_doc( doc );
}

experiment_config load_config( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw config_error( "cannot read config file '" + path + "'" );
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json( ss.str() );
}

void apply_override( experiment_config& cfg, std::string const& assignment )
{
  auto const eq = assignment.find( '=' );
  if ( eq == std::string::npos || eq == 0u )
    throw config_error( "override '" + assignment + "' is not of the form key=value" );
  auto const path = assignment.substr( 0, eq );
  auto const text = assignment.substr( eq + 1 );
  ordered_json value;
  try
  {
    value = ordered_json::parse( text );
  }
  catch ( nlohmann::json::exception const& )
  {
    value = text;
  }
  ordered_json user = ordered_json::object();
  auto* node = &user;
  std::size_t start = 0;
  while ( true )
  {
    auto const dot = path.find( '.', start );
    auto const part = path.substr( start, dot == std::string::npos ? std::string::npos : dot - start );
    if ( part.empty() )
      throw config_error( "override key '" + path + "' has an empty component" );
    if ( dot == std::string::npos )
    {
      ( *node )[part] = value;
      break;
    }
    node = &( *node )[part];
    start = dot + 1;
  }
  auto doc = to_doc( cfg );
  merge_into( doc, user, "" );
  cfg = checked_from_doc( doc );
}

void validate_config( experiment_config const& c )
{
  try
  {
    validate_attack_config( c.attack );
    validate_gbrt_params( c.predictor );
    auto s = c.search;
    if ( s.pt_threshold == 0 )
      s.pt_threshold = 1;
    validate_search_params( s );
  }
  catch ( std::exception const& e )
  {
    throw config_error( e.what() );
  }
  if ( c.search.pt_threshold < 0 )
    throw config_error( "search.pt_threshold must be non-negative" );
  if ( c.design.source.empty() )
    throw config_error( "design.source is empty" );
  if ( c.collect.sa_fraction < 0 || c.collect.sa_fraction > 1 )
    throw config_error( "collect.sa_fraction must be in [0, 1]" );
  if ( c.collect.sa_fraction > 0 && c.collect.sa_evaluations == 0u )
    throw config_error( "collect.sa_evaluations must be positive" );
  if ( c.sa.initial_temperature < 0 || !( c.sa.cooling > 0 && c.sa.cooling <= 1 ) )
    throw config_error( "sa: temperature must be non-negative and cooling in (0, 1]" );
  if ( c.compare.direct_evaluations == 0u || !( c.compare.budget_seconds > 0 ) || c.compare.timing_samples == 0u )
    throw config_error( "compare: evaluations, budget and timing samples must be positive" );
  if ( c.output.empty() )
    throw config_error( "output directory is empty" );
  for ( auto const* scale : { &c.library.leakage_scale, &c.library.delay_scale } )
  {
    for ( auto x : *scale )
    {
      if ( !( x > 0 ) )
        throw config_error( "library scales must be positive" );
    }
  }
}

std::string config_hash( experiment_config const& cfg )
{
  auto doc = to_doc( cfg );
  doc.erase( "output" );
  return fnv1a_hex( doc.dump() );
}

std::string evaluation_hash( experiment_config const& cfg )
{
  auto const doc = to_doc( cfg );
  ordered_json part{ { "design", doc["design"] }, { "library", doc["library"] }, { "attack", doc["attack"] } };
  return fnv1a_hex( part.dump() );
}

std::string artifact_header( experiment_config const& cfg )
{
  std::ostringstream os;
  os << "# secsyn config_hash=" << config_hash( cfg ) << " evaluation_hash=" << evaluation_hash( cfg ) << " library_seed=" << cfg.library.seed
     << " attack_seed=" << cfg.attack.seed << " collect_seed=" << cfg.collect.seed << " predictor_seed=" << cfg.predictor_seed
     << " search_seed=" << cfg.search.seed << " compare_seed=" << cfg.compare.seed << "\n";
  return os.str();
}

} // namespace secsyn
