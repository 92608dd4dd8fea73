#include <doctest.h>

#include "fixtures.hpp"

#include <secsyn/pipeline.hpp>

#include <set>

using namespace secsyn;

namespace
{

/* cheap labels: noise-free attacks succeed within a few dozen traces */
experiment_config quick_config()
{
  experiment_config c;
  c.attack.sigma = 0;
  c.attack.trials = 16;
  c.attack.trials_coarse = 8;
  c.attack.cap = 512;
  c.collect.samples = 6;
  c.collect.sa_fraction = 0.5;
  c.collect.sa_evaluations = 4;
  return c;
}

} // namespace

TEST_CASE( "config round trip" )
{
  experiment_config c;
  c.attack.sigma = 700;
  c.design.key = 0x3c;
  c.design.sbox = sbox_style::tower;
  c.countermeasure = countermeasure_kind::quadseal;
  c.library.leakage_scale = { 8.0, 2.5, 1.0 };
  c.extraction = extraction_policy::most_rewarding;
  c.search.c = 0.7;
  c.predictor_seed = 99;
  c.output = "elsewhere";
  auto const text = config_to_json( c );
  auto const back = config_from_json( text );
  CHECK( config_to_json( back ) == text );
  CHECK( config_hash( back ) == config_hash( c ) );
  CHECK( back.design.sbox == sbox_style::tower );
  CHECK( back.library.leakage_scale[1] == 2.5 );

  /* the output location does not change the experiment */
  auto moved = c;
  moved.output = "x";
  CHECK( config_hash( moved ) == config_hash( c ) );
  moved.attack.seed = 2;
  CHECK( config_hash( moved ) != config_hash( c ) );
  CHECK( evaluation_hash( moved ) != evaluation_hash( c ) );
  moved = c;
  moved.search.iterations = 7;
  CHECK( config_hash( moved ) != config_hash( c ) );
  CHECK( evaluation_hash( moved ) == evaluation_hash( c ) );
  CHECK( artifact_header( c ).find( "config_hash=" + config_hash( c ) ) != std::string::npos );
}

TEST_CASE( "config strictness" )
{
  CHECK( config_from_json( R"({"schema": 1})" ).attack.cap == 20000 );
  CHECK( config_from_json( R"({"schema": 1, "attack": {"sigma": 700}})" ).attack.sigma == 700 );
  CHECK_THROWS_AS( config_from_json( R"({"attack": {"sigma": 700}})" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 2})" ), config_error );
  CHECK_THROWS_WITH_AS( config_from_json( R"({"schema": 1, "attack": {"sigmaa": 1}})" ), doctest::Contains( "attack.sigmaa" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 1, "attack": {"sigma": "loud"}})" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 1, "attack": 5})" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 1, "attack": {"target_rate": 1.5}})" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 1, "design": {"key": 300}})" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 1, "countermeasure": "wddl"})" ), config_error );
  CHECK_THROWS_AS( config_from_json( R"({"schema": 1, "search": {"extraction": "best"}})" ), config_error );
  CHECK_THROWS_AS( config_from_json( "{schema" ), config_error );
  CHECK_THROWS_AS( load_config( "/nonexistent/config.json" ), config_error );
}

TEST_CASE( "config overrides" )
{
  experiment_config c;
  apply_override( c, "attack.sigma=350.5" );
  apply_override( c, "countermeasure=quadseal" );
  apply_override( c, "design.source=\"aes-byte\"" );
  apply_override( c, "search.extraction=most_rewarding" );
  CHECK( c.attack.sigma == 350.5 );
  CHECK( c.countermeasure == countermeasure_kind::quadseal );
  CHECK( c.extraction == extraction_policy::most_rewarding );
  CHECK_THROWS_AS( apply_override( c, "attack.sigmaa=1" ), config_error );
  CHECK_THROWS_AS( apply_override( c, "attack.sigma" ), config_error );
  CHECK_THROWS_AS( apply_override( c, "attack..sigma=1" ), config_error );
  CHECK_THROWS_AS( apply_override( c, "attack.cap=1" ), config_error );
  CHECK( c.attack.cap == 20000 );
}

TEST_CASE( "context and verification" )
{
  auto cfg = quick_config();
  auto const ctx = make_context( cfg );
  CHECK( ctx.design.num_inputs() == 8 );
  auto const n = synthesize( ctx, compress2rs_like_recipe() );
  auto const d = make_target( ctx, n );
  for ( uint32_t pt = 0; pt < 256u; ++pt )
    CHECK( evaluate( d, uint8_t( pt ) ) == aes_sbox()[pt ^ cfg.design.key] );
  CHECK( protect( ctx, d, countermeasure_kind::elb ).countermeasure == countermeasure_kind::elb );

  cfg.design.source = "/nonexistent.aag";
  CHECK_THROWS_AS( make_context( cfg ), config_error );
  cfg.design.source = ( test::benchmark_dir() / "adder4.aag" ).string();
  CHECK_THROWS_AS( make_context( cfg ), config_error );
}

TEST_CASE( "AIGER design source must compute the keyed S-box" )
{
  auto const path = std::filesystem::temp_directory_path() / "secsyn_sbox_test.aag";
  write_aiger_file( build_aes_byte( 0x2b ), path.string() );
  auto cfg = quick_config();
  cfg.design.source = path.string();
  CHECK_NOTHROW( make_context( cfg ) );
  cfg.design.key = 0x2c;
  CHECK_THROWS_AS( make_context( cfg ), verification_error );
  std::filesystem::remove( path );
}

TEST_CASE( "evaluation of a recipe" )
{
  auto const ctx = make_context( quick_config() );
  auto const e = evaluate_recipe( ctx, compress2rs_like_recipe(), countermeasure_kind::elb );
  CHECK( !e.pre.censored() );
  CHECK( e.post_ppa.area > e.pre_ppa.area );
  CHECK( e.post.value_or_cap() >= e.pre.value_or_cap() );
  auto const none = evaluate_recipe( ctx, compress2rs_like_recipe(), countermeasure_kind::none );
  CHECK( none.post.value_or_cap() == none.pre.value_or_cap() );
  auto const row = evaluation_csv_row( "x", e );
  auto const header = evaluation_csv_header();
  CHECK( std::count( row.begin(), row.end(), ',' ) == std::count( header.begin(), header.end(), ',' ) );
  auto const s = label_recipe( ctx, compress2rs_like_recipe() );
  CHECK( s.label == double( e.pre.value_or_cap() ) );
  CHECK( s.features == e.features );
}

TEST_CASE( "collection recipes and the resume contract" )
{
  auto const ctx = make_context( quick_config() );
  auto const recipes = collection_recipes( ctx );
  REQUIRE( recipes.size() == 6 );
  CHECK( std::set<recipe>( recipes.begin(), recipes.end() ).size() == 6 );
  CHECK( collection_recipes( ctx ) == recipes );
  for ( auto const& r : recipes )
    CHECK( r.size() == default_horizon );

  uint32_t calls = 0;
  auto const first = collect_dataset( ctx, {}, [&]( labeled_sample const& ) { ++calls; }, 3 );
  CHECK( first.new_evaluations == 3 );
  CHECK( first.samples.size() == 3 );
  CHECK( calls == 3 );
  auto const second = collect_dataset( ctx, first.samples );
  CHECK( second.new_evaluations == 3 );
  CHECK( second.reused == 3 );
  REQUIRE( second.samples.size() == 6 );
  for ( std::size_t i = 0; i < 6; ++i )
    CHECK( second.samples[i].actions == recipes[i] );
  CHECK( collect_dataset( ctx, second.samples ).new_evaluations == 0 );
  CHECK( dataset_to_csv( collect_dataset( ctx, {} ).samples ) == dataset_to_csv( second.samples ) );
}

TEST_CASE( "iteration accounting" )
{
  CHECK( iterations_in_budget( 600, 2.0 ) == 300 );
  CHECK( iterations_in_budget( 600, 0.07 ) == 8571 );
  CHECK( iterations_in_budget( 600, 0 ) == 0 );
  CHECK( iterations_in_budget( -1, 1 ) == 0 );

  surrogate_model m;
  m.corpus_y = { 5, 1, 3, 2 };
  CHECK( median_label( m ) == 2.5 );
  m.corpus_y.push_back( 9 );
  CHECK( median_label( m ) == 3 );
  CHECK_THROWS_AS( median_label( surrogate_model{} ), predictor_error );
}
