#include <secsyn/power.hpp>

#include <random>
#include <sstream>

namespace secsyn
{

namespace
{

/* per gate, the instance leakage in each input state */
std::vector<std::array<double, 4>> leakage_tables( netlist const& n, cell_library const& lib )
{
  std::vector<std::array<double, 4>> tables;
  tables.reserve( n.gates().size() );
  for ( uint32_t i = 0; i < n.gates().size(); ++i )
  {
    auto const& g = n.gates()[i];
    std::array<double, 4> t{};
    for ( uint32_t s = 0; s < ( 1u << kind_info( g.kind ).arity ); ++s )
      t[s] = lib.instance_leakage( g.kind, g.vt, i, s );
    tables.push_back( t );
  }
  return tables;
}

} // namespace

std::vector<double> leakage_samples( crypto_design const& d, cell_library const& lib, std::vector<uint8_t> const& plaintexts )
{
  auto const& n = d.circuit;
  auto const tables = leakage_tables( n, lib );
  std::vector<double> out( plaintexts.size(), 0.0 );
  std::array<double, 64> acc;
  for ( std::size_t first = 0; first < plaintexts.size(); first += 64u )
  {
    auto const lanes = std::min<std::size_t>( 64u, plaintexts.size() - first );
    auto const words = design_input_words( d, plaintexts, first, lanes );
    auto const values = simulate_nets( n, words, 1 );
    acc.fill( 0.0 );
    for ( std::size_t i = 0; i < tables.size(); ++i )
    {
      auto const& g = n.gates()[i];
      auto const& t = tables[i];
      auto const a = values[g.inputs[0]];
      auto const b = kind_info( g.kind ).arity == 2u ? values[g.inputs[1]] : 0u;
      for ( std::size_t lane = 0; lane < lanes; ++lane )
        acc[lane] += t[( ( a >> lane ) & 1u ) | ( ( ( b >> lane ) & 1u ) << 1 )];
    }
    std::copy_n( acc.begin(), lanes, out.begin() + std::ptrdiff_t( first ) );
  }
  return out;
}

trace_set simulate_traces( crypto_design const& d, cell_library const& lib, std::vector<uint8_t> const& plaintexts, double sigma, uint64_t seed )
{
  if ( !( sigma >= 0 ) )
    throw attack_error( "noise sigma must be non-negative" );
  trace_set t{ plaintexts, leakage_samples( d, lib, plaintexts ), sigma, seed };
  if ( sigma > 0 )
  {
    std::mt19937_64 rng( seed );
    std::normal_distribution<double> noise( 0.0, sigma );
    for ( auto& v : t.traces )
      v += noise( rng );
  }
  return t;
}

std::string traces_to_csv( trace_set const& t )
{
  std::ostringstream os;
  os.precision( 17 );
  os << "plaintext_hex,power\n";
  char hex[3];
  for ( std::size_t i = 0; i < t.traces.size(); ++i )
  {
    std::snprintf( hex, sizeof( hex ), "%02x", unsigned( t.plaintexts[i] ) );
    os << hex << ',' << t.traces[i] << '\n';
  }
  return os.str();
}

} // namespace secsyn
