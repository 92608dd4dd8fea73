#include <doctest.h>

#include "fixtures.hpp"

#include <secsyn/aes.hpp>
#include <secsyn/simulation.hpp>
#include <secsyn/techlib.hpp>
#include <secsyn/transforms.hpp>

#include <random>

using namespace secsyn;

namespace
{

cell_library const& default_library()
{
  static auto const lib = generate_library( {} );
  return lib;
}

} // namespace

TEST_CASE( "library tables" )
{
  auto const& lib = default_library();
  CHECK( lib.cells().size() == num_cell_kinds * num_vt_classes );
  auto const& inv = lib.cell( cell_kind::inv, vt_class::hvt );
  REQUIRE( inv.leakage.size() == 2 );
  CHECK( inv.leakage[0] > 0 );
  CHECK( inv.leakage[1] > 0 );
  for ( auto const& c : lib.cells() )
  {
    CHECK( c.leakage.size() == ( 1u << kind_info( c.kind ).arity ) );
    CHECK( c.area > 0 );
    CHECK( c.delay > 0 );
  }

  /* the jitter is shared by the VT classes, so LVT/HVT at state 11 is exactly the scale ratio 10:1 */
  auto const lvt = lib.cell( cell_kind::and2, vt_class::lvt ).leakage[3];
  auto const hvt = lib.cell( cell_kind::and2, vt_class::hvt ).leakage[3];
  CHECK( lvt > hvt );
  CHECK( lvt / hvt == doctest::Approx( 10.0 ).epsilon( 1e-12 ) );

  /* state 11 of a 2-input cell: base * (1 + 2 alpha) within the jitter band */
  auto const rvt = lib.cell( cell_kind::and2, vt_class::rvt ).leakage[3];
  auto const nominal = kind_info( cell_kind::and2 ).base_leakage * 3.0 * 1.5;
  CHECK( rvt >= nominal * 0.95 );
  CHECK( rvt <= nominal * 1.05 );

  for ( auto k : { cell_kind::inv, cell_kind::and2, cell_kind::xor2 } )
  {
    CHECK( lib.cell( k, vt_class::lvt ).mean_leakage() > lib.cell( k, vt_class::rvt ).mean_leakage() );
    CHECK( lib.cell( k, vt_class::rvt ).mean_leakage() > lib.cell( k, vt_class::hvt ).mean_leakage() );
    CHECK( lib.cell( k, vt_class::lvt ).delay < lib.cell( k, vt_class::rvt ).delay );
    CHECK( lib.cell( k, vt_class::rvt ).delay < lib.cell( k, vt_class::hvt ).delay );
  }
}

TEST_CASE( "library determinism, parameters and serialization" )
{
  library_params p;
  p.seed = 42;
  CHECK( library_to_json( generate_library( p ) ) == library_to_json( generate_library( p ) ) );
  auto q = p;
  q.seed = 43;
  CHECK( library_to_json( generate_library( p ) ) != library_to_json( generate_library( q ) ) );

  auto const lib = generate_library( p );
  auto const back = library_from_json( library_to_json( lib ) );
  CHECK( library_to_json( back ) == library_to_json( lib ) );
  CHECK( back.instance_leakage( cell_kind::nor2, vt_class::lvt, 17, 2 ) == lib.instance_leakage( cell_kind::nor2, vt_class::lvt, 17, 2 ) );

  auto bad = p;
  bad.leakage_scale[1] = 0;
  CHECK_THROWS_AS( generate_library( bad ), techlib_error );
  bad = p;
  bad.delay_scale[2] = -1;
  CHECK_THROWS_AS( generate_library( bad ), techlib_error );
  CHECK_THROWS_AS( library_from_json( "{\"format\": \"other\"}" ), techlib_error );
  CHECK_THROWS_AS( library_from_json( "not json" ), techlib_error );
  CHECK_THROWS_AS( parse_cell_kind( "AND3" ), techlib_error );
  CHECK( parse_vt_class( "HVT" ) == vt_class::hvt );
}

TEST_CASE( "instance variation stays within its band" )
{
  auto const& lib = default_library();
  auto const nominal = lib.cell( cell_kind::xor2, vt_class::rvt ).leakage[1];
  bool varied = false;
  for ( uint32_t i = 0; i < 200; ++i )
  {
    auto const v = lib.instance_leakage( cell_kind::xor2, vt_class::rvt, i, 1 );
    CHECK( v >= nominal * 0.95 );
    CHECK( v <= nominal * 1.05 );
    varied = varied || v != nominal;
  }
  CHECK( varied );
  library_params p;
  p.instance_variation = 0;
  auto const flat = generate_library( p );
  CHECK( flat.instance_leakage( cell_kind::inv, vt_class::lvt, 5, 0 ) == flat.cell( cell_kind::inv, vt_class::lvt ).leakage[0] );
}

TEST_CASE( "mapping small circuits" )
{
  auto const& lib = default_library();

  auto const buffer = parse_aiger( "aag 1 1 0 1 0\n2\n2" );
  auto const nb = map_aig( buffer, lib );
  CHECK( nb.gates().size() <= 1 );
  CHECK( equivalent( to_aig( nb ), buffer ).outcome == equivalence_result::verdict::equal );

  auto const inverter = parse_aiger( "aag 1 1 0 1 0\n2\n3" );
  auto const ni = map_aig( inverter, lib );
  CHECK( ni.gates().size() == 1 );
  CHECK( equivalent( to_aig( ni ), inverter ).outcome == equivalence_result::verdict::equal );

  auto const and2 = parse_aiger( "aag 3 2 0 1 1\n2\n4\n6\n6 2 4" );
  auto const na = map_aig( and2, lib );
  CHECK( na.gates().size() <= 2 );
  CHECK( equivalent( to_aig( na ), and2 ).outcome == equivalence_result::verdict::equal );

  /* a ^ b as three ANDs becomes one XOR2 */
  aig x( 2 );
  x.add_output( x.add_xor( x.input( 0 ), x.input( 1 ) ) );
  auto const nx = map_aig( x, lib );
  REQUIRE( nx.gates().size() == 1 );
  CHECK( nx.gates()[0].kind == cell_kind::xor2 );

  CHECK_THROWS_AS( map_aig( and2, cell_library{} ), techlib_error );
}

TEST_CASE( "mapping preserves function on every benchmark under random recipes" )
{
  auto const& lib = default_library();
  std::mt19937_64 rng( 5 );
  for ( auto const& path : test::benchmark_files() )
  {
    auto const g = read_aiger_file( path.string() );
    CAPTURE( path.filename().string() );
    CHECK( equivalent( to_aig( map_aig( g, lib ) ), g ).outcome == equivalence_result::verdict::equal );
    for ( int i = 0; i < 3; ++i )
    {
      recipe r( default_horizon );
      for ( auto& a : r )
        a = action_id( rng() % num_actions() );
      auto const h = apply_recipe( g, r );
      CHECK( equivalent( to_aig( map_aig( h, lib ) ), g ).outcome == equivalence_result::verdict::equal );
    }
  }
}

TEST_CASE( "netlist checks and simulation" )
{
  netlist n( 2 );
  auto const a = n.add_gate( cell_kind::nand2, vt_class::rvt, n.input_net( 0 ), n.input_net( 1 ) );
  auto const b = n.add_gate( cell_kind::inv, vt_class::hvt, a );
  n.add_output( b );
  n.add_output( net_const1 );
  CHECK( simulate( n, { true, true } ) == std::vector<bool>{ true, true } );
  CHECK( simulate( n, { true, false } ) == std::vector<bool>{ false, true } );
  CHECK_THROWS_AS( n.add_gate( cell_kind::inv, vt_class::rvt, 99 ), techlib_error );
  CHECK_THROWS_AS( n.add_output( 99 ), techlib_error );
  CHECK_THROWS_AS( simulate( n, { true } ), techlib_error );
  auto const drivers = n.drivers();
  CHECK( drivers[a] == 0 );
  CHECK( drivers[b] == 1 );
  CHECK( drivers[n.input_net( 0 )] == -1 );
  CHECK( dump_netlist( n ).find( "NAND2_RVT" ) != std::string::npos );
}

TEST_CASE( "ppa" )
{
  auto const& lib = default_library();
  auto const empty = ppa( netlist( 3 ), lib );
  CHECK( empty.area == 0 );
  CHECK( empty.delay == 0 );
  CHECK( empty.static_power == 0 );

  netlist one( 2 );
  one.add_output( one.add_gate( cell_kind::and2, vt_class::rvt, one.input_net( 0 ), one.input_net( 1 ) ) );
  auto const r = ppa( one, lib );
  CHECK( r.area == 2.0 );
  CHECK( r.delay == doctest::Approx( kind_info( cell_kind::and2 ).delay * lib.params().delay_scale[1] ) );
  CHECK( r.static_power > 0 );

  /* promoting one gate of a mapped circuit RVT -> LVT */
  auto n = map_aig( build_sbox_aig(), lib );
  for ( auto& g : n.gates() )
    g.vt = vt_class::rvt;
  auto const before = ppa( n, lib );
  n.gates()[n.gates().size() / 2].vt = vt_class::lvt;
  auto const after = ppa( n, lib );
  CHECK( after.area == before.area );
  CHECK( after.delay <= before.delay );
  CHECK( after.static_power > before.static_power );
}

TEST_CASE( "features" )
{
  auto const& lib = default_library();
  netlist rvt( 2 );
  rvt.add_gate( cell_kind::and2, vt_class::rvt, rvt.input_net( 0 ), rvt.input_net( 1 ) );
  auto const f0 = extract_features( rvt, lib );
  CHECK( f0.f2_lvt_area_pct == 0 );
  CHECK( f0.f3_hvt_area_pct == 0 );
  CHECK( f0.f1_overall_diversity == 1 );

  netlist two( 2 );
  two.add_gate( cell_kind::and2, vt_class::lvt, two.input_net( 0 ), two.input_net( 1 ) );
  two.add_gate( cell_kind::and2, vt_class::hvt, two.input_net( 0 ), two.input_net( 1 ) );
  auto const f = extract_features( two, lib );
  CHECK( f.f1_overall_diversity == 2 );
  CHECK( f.f2_lvt_area_pct == 0.5 );
  CHECK( f.f3_hvt_area_pct == 0.5 );

  CHECK( extract_features( netlist( 1 ), lib ) == feature_vector{} );

  /* different policies and different structures give different VT mixes */
  auto const g = build_sbox_aig();
  auto const strict = map_aig( g, lib, { 0.9, 0.5 } );
  auto const loose = map_aig( g, lib, { 0.6, 0.3 } );
  CHECK( extract_features( strict, lib ).f2_lvt_area_pct != extract_features( loose, lib ).f2_lvt_area_pct );
  auto const balanced = map_aig( balance( g ), lib );
  CHECK( !( extract_features( balanced, lib ) == extract_features( strict, lib ) ) );

  for ( auto const* n : { &strict, &loose, &balanced } )
  {
    auto const fv = extract_features( *n, lib );
    CHECK( fv.f2_lvt_area_pct + fv.f3_hvt_area_pct <= 1.0 );
    CHECK( fv.f1_overall_diversity >= 1 );
    CHECK( fv.f1_overall_diversity <= double( lib.cells().size() ) );
  }
}

TEST_CASE( "VT promotion never slows a circuit down" )
{
  auto const& lib = default_library();
  auto n = map_aig( build_sbox_aig(), lib );
  for ( auto& g : n.gates() )
    g.vt = vt_class::hvt;
  std::mt19937_64 rng( 3 );
  auto prev = ppa( n, lib );
  for ( int step = 0; step < 40; ++step )
  {
    auto& g = n.gates()[rng() % n.gates().size()];
    if ( g.vt == vt_class::lvt )
      continue;
    g.vt = g.vt == vt_class::hvt ? vt_class::rvt : vt_class::lvt;
    auto const cur = ppa( n, lib );
    CHECK( cur.delay <= prev.delay );
    CHECK( cur.static_power >= prev.static_power );
    prev = cur;
  }
}
