#include <doctest.h>

#include <secsyn/aes.hpp>
#include <secsyn/power.hpp>
#include <secsyn/simulation.hpp>
#include <secsyn/transforms.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace secsyn;

namespace
{

cell_library const& default_library()
{
  static auto const lib = generate_library( {} );
  return lib;
}

crypto_design const& default_design()
{
  static auto const d = make_crypto_design( map_aig( build_aes_byte( 0x2b ), default_library() ), 0x2b );
  return d;
}

std::vector<uint8_t> all_plaintexts()
{
  std::vector<uint8_t> pts( 256 );
  for ( uint32_t i = 0; i < 256u; ++i )
    pts[i] = uint8_t( i );
  return pts;
}

} // namespace

TEST_CASE( "S-box reference values" )
{
  auto const& s = aes_sbox();
  /* first row and a few scattered entries of the published table */
  std::array<uint8_t, 16> const row0{ 0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76 };
  for ( uint32_t i = 0; i < 16u; ++i )
    CHECK( s[i] == row0[i] );
  CHECK( s[0x53] == 0xed );
  CHECK( s[0x10] == 0xca );
  CHECK( s[0x8f] == 0x73 );
  CHECK( s[0xc9] == 0xdd );
  CHECK( s[0xff] == 0x16 );
  CHECK( std::set<uint8_t>( s.begin(), s.end() ).size() == 256 );
  CHECK( gf256_mul( 0x57, 0x83 ) == 0xc1 );
  CHECK( gf256_inverse( 0x53 ) == 0xca );
  CHECK( gf256_inverse( 0 ) == 0 );
}

TEST_CASE( "AES byte circuits" )
{
  auto const& s = aes_sbox();
  for ( auto style : { sbox_style::table, sbox_style::tower } )
  {
    for ( uint8_t key : { uint8_t( 0x00 ), uint8_t( 0x2b ), uint8_t( 0xff ) } )
    {
      auto const g = build_aes_byte( key, false, style );
      REQUIRE( g.num_inputs() == 8 );
      REQUIRE( g.num_outputs() == 8 );
      for ( uint32_t pt = 0; pt < 256u; ++pt )
      {
        std::vector<bool> in( 8 );
        for ( uint32_t i = 0; i < 8u; ++i )
          in[i] = ( pt >> i ) & 1u;
        auto const out = simulate( g, in );
        uint8_t v = 0;
        for ( uint32_t i = 0; i < 8u; ++i )
          v |= uint8_t( out[i] << i );
        CHECK( v == s[pt ^ key] );
      }
    }
    auto const exposed = build_aes_byte( 0, true, style );
    CHECK( exposed.num_inputs() == 16 );
    std::vector<bool> in( 16 );
    for ( uint32_t i = 0; i < 8u; ++i )
    {
      in[i] = ( 0x32 >> i ) & 1u;
      in[8 + i] = ( 0x88 >> i ) & 1u;
    }
    auto const out = simulate( exposed, in );
    uint8_t v = 0;
    for ( uint32_t i = 0; i < 8u; ++i )
      v |= uint8_t( out[i] << i );
    CHECK( v == s[0x32 ^ 0x88] );
  }
  CHECK( build_aes_byte( 1 ).num_ands() > build_aes_byte( 1, false, sbox_style::tower ).num_ands() );
}

TEST_CASE( "hamming weight" )
{
  CHECK( hamming_weight( 0x00 ) == 0 );
  CHECK( hamming_weight( 0xff ) == 8 );
  CHECK( hamming_weight( 0x53 ) == 4 );
  CHECK( hamming_weight( 0x80 ) == 1 );
}

TEST_CASE( "crypto design" )
{
  auto const& d = default_design();
  CHECK( d.key == 0x2b );
  CHECK( d.phases.size() == 1 );
  for ( uint32_t pt = 0; pt < 256u; ++pt )
    CHECK( evaluate( d, uint8_t( pt ) ) == aes_sbox()[pt ^ 0x2b] );
  CHECK_THROWS_AS( evaluate( d, 0, 1 ), design_error );

  /* the capture stage appends loads INV gates per output bit */
  auto const n = map_aig( build_aes_byte( 0x2b ), default_library() );
  capture_params cp;
  cp.loads = 3;
  cp.vt = vt_class::hvt;
  auto const small = make_crypto_design( n, 0x2b, cp );
  CHECK( small.circuit.gates().size() == n.gates().size() + 24 );
  CHECK( small.circuit.gates().back().vt == vt_class::hvt );
  CHECK( small.circuit.gates().back().kind == cell_kind::inv );

  CHECK_THROWS_AS( make_crypto_design( n, 0x2c ), design_error );
  CHECK_THROWS_AS( make_crypto_design( netlist( 4 ), 0 ), design_error );
  CHECK( parse_countermeasure( "elb" ) == countermeasure_kind::elb );
  CHECK_THROWS_WITH_AS( parse_countermeasure( "masking" ), doctest::Contains( "masking" ), design_error );
}

TEST_CASE( "noiseless traces match a straight-line leakage sum" )
{
  auto const& lib = default_library();
  auto const& d = default_design();
  std::vector<uint8_t> pts{ 0x00, 0x13, 0x13, 0xfe, 0x80, 0x2b };
  for ( int i = 0; i < 70; ++i )
    pts.push_back( uint8_t( 37 * i + 5 ) );
  auto const t = simulate_traces( d, lib, pts, 0.0, 9 );
  REQUIRE( t.traces.size() == pts.size() );
  CHECK( t.traces[1] == t.traces[2] );
  for ( std::size_t i = 0; i < pts.size(); ++i )
  {
    /* one scalar simulation per trace, then a plain sum over the cells */
    std::vector<bool> in( 8 );
    for ( uint32_t b = 0; b < 8u; ++b )
      in[b] = ( pts[i] >> b ) & 1u;
    std::vector<uint8_t> value( d.circuit.num_nets(), 0 );
    value[net_const1] = 1;
    for ( uint32_t b = 0; b < 8u; ++b )
      value[d.circuit.input_net( b )] = in[b];
    double sum = 0;
    for ( uint32_t g = 0; g < d.circuit.gates().size(); ++g )
    {
      auto const& gt = d.circuit.gates()[g];
      auto const state = gate_state( gt, value );
      value[gt.output] = ( kind_info( gt.kind ).function >> state ) & 1u;
      sum += lib.instance_leakage( gt.kind, gt.vt, g, state );
    }
    CHECK( t.traces[i] == doctest::Approx( sum ).epsilon( 1e-12 ) );
  }
}

TEST_CASE( "trace noise" )
{
  auto const& lib = default_library();
  auto const& d = default_design();
  std::vector<uint8_t> pts( 10000, 0x42 );
  auto const clean = simulate_traces( d, lib, { 0x42 }, 0.0, 1 ).traces[0];
  auto const t = simulate_traces( d, lib, pts, 1.0, 77 );
  double mean = 0, sq = 0;
  for ( auto v : t.traces )
    mean += v - clean;
  mean /= double( t.traces.size() );
  for ( auto v : t.traces )
    sq += ( v - clean - mean ) * ( v - clean - mean );
  auto const sd = std::sqrt( sq / double( t.traces.size() - 1 ) );
  CHECK( sd == doctest::Approx( 1.0 ).epsilon( 0.05 ) );
  CHECK( std::fabs( mean ) < 0.05 );

  auto const again = simulate_traces( d, lib, pts, 1.0, 77 );
  CHECK( again.traces == t.traces );
  CHECK( simulate_traces( d, lib, pts, 1.0, 78 ).traces != t.traces );
  CHECK_THROWS_AS( simulate_traces( d, lib, pts, -1.0, 1 ), attack_error );

  auto const csv = traces_to_csv( simulate_traces( d, lib, { 0x0a, 0xff }, 0.0, 1 ) );
  CHECK( csv.rfind( "plaintext_hex,power\n0a,", 0 ) == 0 );
  CHECK( csv.find( "\nff," ) != std::string::npos );
}

TEST_CASE( "pearson" )
{
  std::vector<double> const v{ 1, 5, 2, 8, 3 };
  std::vector<double> neg;
  for ( auto x : v )
    neg.push_back( -x );
  CHECK( pearson( v, v ) == doctest::Approx( 1.0 ).epsilon( 1e-15 ) );
  CHECK( pearson( v, neg ) == doctest::Approx( -1.0 ).epsilon( 1e-15 ) );
  /* 1.5 / sqrt(2 * 4.6667) */
  CHECK( pearson( { 1, 2, 3 }, { 1, 2, 4 } ) == doctest::Approx( 0.98198050606 ).epsilon( 1e-9 ) );
  CHECK_THROWS_AS( pearson( { 1, 2 }, { 1, 2, 3 } ), attack_error );
  CHECK_THROWS_AS( pearson( { 1 }, { 1 } ), attack_error );
  CHECK_THROWS_AS( pearson( { 2, 2, 2 }, { 1, 2, 3 } ), attack_error );
}

TEST_CASE( "CPA" )
{
  auto const& lib = default_library();
  auto const& d = default_design();
  auto const pts = all_plaintexts();
  auto const t = simulate_traces( d, lib, pts, 0.0, 1 );
  auto const r = cpa_attack( t );
  CHECK( !r.degenerate );
  REQUIRE( r.ranking.size() == 256 );
  CHECK( r.ranking.front().key == 0x2b );
  CHECK( r.rank_of( 0x2b ) == 1 );
  for ( std::size_t i = 1; i < r.ranking.size(); ++i )
    CHECK( r.ranking[i - 1].correlation >= r.ranking[i].correlation );

  /* correlation of the correct key equals pearson against the hypothesis */
  std::vector<double> h;
  for ( auto p : pts )
    h.push_back( hamming_weight( aes_sbox()[p ^ 0x2b] ) );
  CHECK( r.ranking.front().correlation == doctest::Approx( std::fabs( pearson( h, t.traces ) ) ).epsilon( 1e-9 ) );

  /* degenerate: one repeated plaintext at zero noise */
  auto const flat = cpa_attack( simulate_traces( d, lib, std::vector<uint8_t>( 50, 0x11 ), 0.0, 1 ) );
  CHECK( flat.degenerate );
  CHECK( flat.ranking.front().key == 0 );
  CHECK( flat.ranking.back().key == 255 );

  CHECK_THROWS_AS( cpa_attack( { 1 }, { 1.0 } ), attack_error );
  CHECK_THROWS_AS( cpa_attack( { 1, 2 }, { 1.0 } ), attack_error );
}

TEST_CASE( "CPA on pure noise ranks the key uniformly" )
{
  std::vector<uint32_t> ranks;
  for ( uint64_t seed = 0; seed < 100; ++seed )
  {
    std::mt19937_64 rng( seed );
    std::normal_distribution<double> noise;
    std::vector<uint8_t> pts( 500 );
    std::vector<double> traces( 500 );
    for ( std::size_t i = 0; i < pts.size(); ++i )
    {
      pts[i] = uint8_t( rng() >> 56 );
      traces[i] = noise( rng );
    }
    ranks.push_back( cpa_attack( pts, traces ).rank_of( 0x2b ) );
  }
  std::sort( ranks.begin(), ranks.end() );
  auto const median = ( ranks[49] + ranks[50] ) / 2u;
  CHECK( median >= 64 );
  CHECK( median <= 192 );
}

TEST_CASE( "attack configuration" )
{
  attack_config cfg;
  CHECK_NOTHROW( validate_attack_config( cfg ) );
  auto bad = cfg;
  bad.sigma = -1;
  CHECK_THROWS_AS( validate_attack_config( bad ), attack_error );
  bad = cfg;
  bad.cap = 1;
  CHECK_THROWS_AS( validate_attack_config( bad ), attack_error );
  bad = cfg;
  bad.target_rate = 0;
  CHECK_THROWS_AS( validate_attack_config( bad ), attack_error );
  bad = cfg;
  bad.coarse_factor = 1.0;
  CHECK_THROWS_AS( validate_attack_config( bad ), attack_error );
  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS( validate_attack_config( bad ), attack_error );
}

TEST_CASE( "pt_score" )
{
  auto const& lib = default_library();
  auto const& d = default_design();

  attack_config cfg;
  cfg.trials = 32;
  auto const clean = pt_score( d, lib, cfg );
  REQUIRE( !clean.censored() );
  CHECK( *clean.pt_score <= 256 );
  CHECK( clean.trials == 32 );
  for ( std::size_t i = 1; i < clean.success_curve.size(); ++i )
    CHECK( clean.success_curve[i - 1].trace_count <= clean.success_curve[i].trace_count );
  bool found = false;
  for ( auto const& p : clean.success_curve )
  {
    CHECK( p.success_rate >= 0 );
    CHECK( p.success_rate <= 1 );
    if ( p.thorough && p.trace_count == *clean.pt_score )
    {
      found = true;
      CHECK( p.success_rate >= cfg.target_rate );
      CHECK( p.trials == cfg.trials );
    }
    if ( p.thorough && p.trace_count < *clean.pt_score )
      CHECK( p.success_rate < cfg.target_rate );
  }
  CHECK( found );

  /* reproducible */
  auto const again = pt_score( d, lib, cfg );
  CHECK( again.pt_score == clean.pt_score );
  CHECK( report_to_csv( again ) == report_to_csv( clean ) );

  /* unreachable target */
  attack_config hopeless;
  hopeless.sigma = 1e6;
  hopeless.cap = 10;
  hopeless.trials = 16;
  hopeless.trials_coarse = 16;
  auto const censored = pt_score( d, lib, hopeless );
  CHECK( censored.censored() );
  CHECK( censored.value_or_cap() == 10 );
  CHECK( report_to_csv( censored ).find( "CENSORED(10)" ) != std::string::npos );

  auto invalid = cfg;
  invalid.cap = 0;
  CHECK_THROWS_AS( pt_score( d, lib, invalid ), attack_error );
}

TEST_CASE( "success rate does not increase with noise" )
{
  auto const& lib = default_library();
  auto const& d = default_design();
  attack_config cfg;
  double prev = 1.1;
  for ( double sigma : { 0.0, 150.0, 600.0 } )
  {
    cfg.sigma = sigma;
    auto const rate = success_rate( d, lib, cfg, 128, 128 );
    CHECK( rate <= prev + 0.05 );
    prev = rate;
  }
  CHECK( prev < 0.9 );
  CHECK_THROWS_AS( success_rate( d, lib, cfg, 1, 10 ), attack_error );
}
