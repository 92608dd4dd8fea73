#include <doctest.h>

#include "fixtures.hpp"

#include <secsyn/simulation.hpp>
#include <secsyn/transforms.hpp>

#include <random>
#include <set>

using namespace secsyn;

namespace
{

recipe random_recipe( std::mt19937_64& rng, uint32_t length )
{
  std::uniform_int_distribution<uint32_t> pick( 0, num_actions() - 1u );
  recipe r( length );
  for ( auto& a : r )
    a = pick( rng );
  return r;
}

} // namespace

TEST_CASE( "action set" )
{
  auto const& actions = action_set();
  CHECK( actions.size() == 13 );
  std::set<std::string> names;
  for ( uint32_t i = 0; i < actions.size(); ++i )
  {
    CHECK( actions[i].id == i );
    names.insert( actions[i].name );
  }
  CHECK( names.size() == 13 );
  CHECK( names.count( "balance" ) );
  CHECK( names.count( "rewrite" ) );
  CHECK( names.count( "refactor -z" ) );
  CHECK( names.count( "resub K=12 -z" ) );
}

TEST_CASE( "recipe text" )
{
  auto const r = parse_recipe( "Balance;  REWRITE ; resub K=8 -z" );
  CHECK( r == recipe{ 0, 1, 8 } );
  CHECK( format_recipe( r ) == "balance; rewrite; resub K=8 -z" );
  CHECK( parse_recipe( format_recipe( r ) ) == r );
  CHECK( parse_recipe( "b; rwz; rs12z" ) == recipe{ 0, 2, 12 } );
  CHECK( parse_recipe( "" ).empty() );
  CHECK_THROWS_WITH_AS( parse_recipe( "balance; rewrit; rf" ), doctest::Contains( "'rewrit'" ), recipe_error );
  CHECK( compress2rs_like_recipe().size() == default_horizon );
  CHECK_THROWS_AS( validate_recipe( recipe( 19, 0 ) ), recipe_error );
  CHECK_THROWS_AS( validate_recipe( recipe{ 13 } ), recipe_error );
  CHECK_THROWS_AS( apply_action( test::and_tree4(), 13 ), recipe_error );
}

TEST_CASE( "constant circuit is untouched by every action" )
{
  aig c( 0 );
  c.add_output( lit_false );
  for ( action_id a = 0; a < num_actions(); ++a )
    CHECK( apply_action( c, a ).structurally_equal( c ) );
}

TEST_CASE( "balance reduces AND chain depth" )
{
  auto const chain = test::and_chain4();
  auto const b = apply_action( chain, 0 );
  CHECK( stats( chain ).depth == 3 );
  CHECK( stats( b ).depth == 2 );
  CHECK( equivalent( chain, b ).outcome == equivalence_result::verdict::equal );
}

TEST_CASE( "every action preserves function on every benchmark" )
{
  for ( auto const& path : test::benchmark_files() )
  {
    auto const g = read_aiger_file( path.string() );
    for ( action_id a = 0; a < num_actions(); ++a )
    {
      CAPTURE( path.filename().string() );
      CAPTURE( action_set()[a].name );
      auto const h = apply_action( g, a, 7 );
      auto const r = equivalent( g, h );
      CHECK( r.outcome == equivalence_result::verdict::equal );
      CHECK( h.num_ands() <= g.cleanup().num_ands() );
    }
  }
}

TEST_CASE( "random recipes preserve function" )
{
  std::mt19937_64 rng( 2024 );
  for ( auto const& path : test::benchmark_files() )
  {
    auto const g = read_aiger_file( path.string() );
    for ( int i = 0; i < 3; ++i )
    {
      auto const r = random_recipe( rng, default_horizon );
      CAPTURE( path.filename().string() );
      CAPTURE( format_recipe( r ) );
      CHECK( equivalent( g, apply_recipe( g, r, 3 ) ).outcome == equivalence_result::verdict::equal );
    }
  }
}

TEST_CASE( "recipes: identity, singleton, composition, determinism" )
{
  auto const g = read_aiger_file( ( test::benchmark_dir() / "adder4.aag" ).string() );
  CHECK( apply_recipe( g, {}, 5 ).structurally_equal( g ) );
  for ( action_id a = 0; a < num_actions(); ++a )
    CHECK( apply_recipe( g, { a }, 5 ).structurally_equal( apply_action( g, a, 5 ) ) );

  std::mt19937_64 rng( 99 );
  auto const r1 = random_recipe( rng, 7 );
  auto const r2 = random_recipe( rng, 6 );
  auto joined = r1;
  joined.insert( joined.end(), r2.begin(), r2.end() );
  CHECK( apply_recipe( g, joined, 11 ).structurally_equal( apply_recipe( apply_recipe( g, r1, 11 ), r2, 11 ) ) );
  CHECK( apply_recipe( g, joined, 11 ).structurally_equal( apply_recipe( g, joined, 11 ) ) );
}

TEST_CASE( "baseline recipe does not grow benchmarks" )
{
  for ( auto const& path : test::benchmark_files() )
  {
    auto const g = read_aiger_file( path.string() );
    auto const h = apply_recipe( g, compress2rs_like_recipe() );
    CAPTURE( path.filename().string() );
    CHECK( equivalent( g, h ).outcome == equivalence_result::verdict::equal );
    CHECK( h.num_ands() <= g.num_ands() );
    MESSAGE( path.filename().string() << ": " << g.num_ands() << " -> " << h.num_ands() << " ands, depth " << stats( g ).depth << " -> " << stats( h ).depth );
  }
}

TEST_CASE( "actions differ in effect" )
{
  /* across the benchmark set, each pair of actions yields at least one structural difference */
  std::vector<aig> graphs;
  for ( auto const& path : test::benchmark_files() )
    graphs.push_back( read_aiger_file( path.string() ) );
  std::set<std::pair<action_id, action_id>> same;
  for ( action_id a = 0; a < num_actions(); ++a )
  {
    for ( action_id b = a + 1; b < num_actions(); ++b )
    {
      bool differ = false;
      for ( auto const& g : graphs )
      {
        auto const x = apply_action( apply_action( g, 0 ), a );
        auto const y = apply_action( apply_action( g, 0 ), b );
        differ = differ || !x.structurally_equal( y );
      }
      if ( !differ )
        same.emplace( a, b );
    }
  }
  for ( auto [a, b] : same )
    MESSAGE( "indistinguishable: " << action_set()[a].name << " / " << action_set()[b].name );
}
