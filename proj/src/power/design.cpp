#include <secsyn/aes.hpp>
#include <secsyn/power.hpp>

#include <bit>

namespace secsyn
{

char const* countermeasure_name( countermeasure_kind k )
{
  switch ( k )
  {
  case countermeasure_kind::none:
    return "none";
  case countermeasure_kind::elb:
    return "elb";
  case countermeasure_kind::quadseal:
    return "quadseal";
  }
  return "?";
}

countermeasure_kind parse_countermeasure( std::string const& name )
{
  for ( auto k : { countermeasure_kind::none, countermeasure_kind::elb, countermeasure_kind::quadseal } )
  {
    if ( name == countermeasure_name( k ) )
      return k;
  }
  throw design_error( "unknown countermeasure '" + name + "' (expected none, elb or quadseal)" );
}

uint32_t hamming_weight( uint8_t b )
{
  return uint32_t( std::popcount( unsigned( b ) ) );
}

crypto_design make_crypto_design( netlist n, uint8_t key, capture_params const& capture )
{
  if ( n.num_inputs() != 8u || n.outputs().size() != 8u )
    throw design_error( "crypto design needs an 8-input, 8-output S-box netlist" );
  crypto_design d;
  d.key = key;
  auto const drivers = n.drivers();
  for ( auto o : n.outputs() )
  {
    auto vt = vt_class::rvt;
    if ( capture.vt )
      vt = *capture.vt;
    else if ( drivers[o] >= 0 )
      vt = n.gates()[drivers[o]].vt;
    for ( uint32_t i = 0; i < capture.loads; ++i )
      n.add_gate( cell_kind::inv, vt, o );
  }
  design_phase phase;
  for ( uint8_t i = 0; i < 8u; ++i )
  {
    phase.input_bit.push_back( i );
    phase.input_invert.push_back( 0 );
    phase.output_net[i] = n.outputs()[i];
  }
  d.circuit = std::move( n );
  d.phases.push_back( std::move( phase ) );
  for ( uint32_t pt = 0; pt < 256u; ++pt )
  {
    if ( evaluate( d, uint8_t( pt ) ) != aes_sbox()[pt ^ key] )
      throw design_error( "netlist does not compute SBOX(pt ^ key)" );
  }
  return d;
}

std::vector<uint64_t> design_input_words( crypto_design const& d, std::vector<uint8_t> const& plaintexts, std::size_t first_trace, std::size_t lanes )
{
  auto const inputs = d.circuit.num_inputs();
  std::vector<uint64_t> words( inputs, 0u );
  for ( std::size_t lane = 0; lane < lanes; ++lane )
  {
    auto const t = first_trace + lane;
    auto const& phase = d.phases[t % d.phases.size()];
    auto const pt = plaintexts[t];
    for ( uint32_t i = 0; i < inputs; ++i )
    {
      if ( ( ( pt >> phase.input_bit[i] ) ^ phase.input_invert[i] ) & 1u )
        words[i] |= uint64_t( 1 ) << lane;
    }
  }
  return words;
}

uint8_t evaluate( crypto_design const& d, uint8_t pt, uint32_t phase )
{
  if ( phase >= d.phases.size() )
    throw design_error( "phase out of range" );
  /* place the plaintext at trace index `phase` so that it is taken in that phase */
  std::vector<uint8_t> pts( phase + 1u, pt );
  auto const words = design_input_words( d, pts, phase, 1 );
  auto const values = simulate_nets( d.circuit, words, 1 );
  auto const& p = d.phases[phase];
  uint8_t out = 0;
  for ( uint32_t i = 0; i < 8u; ++i )
  {
    if ( ( values[p.output_net[i]] ^ p.output_invert[i] ) & 1u )
      out |= uint8_t( 1u << i );
  }
  return out;
}

} // namespace secsyn
