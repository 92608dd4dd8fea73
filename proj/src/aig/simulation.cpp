#include <secsyn/simulation.hpp>

#include <algorithm>
#include <random>

namespace secsyn
{

namespace
{

constexpr uint64_t elementary[6] = {
    0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
    0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL };

} // namespace

std::vector<uint64_t> simulate_words( aig const& g, std::span<uint64_t const> input_words, std::size_t words )
{
  if ( input_words.size() != std::size_t( g.num_inputs() ) * words )
  {
    throw aig_error( "simulate_words: expected " + std::to_string( g.num_inputs() * words ) + " input words" );
  }
  std::vector<uint64_t> values( std::size_t( g.num_vars() ) * words, 0u );
  std::copy( input_words.begin(), input_words.end(), values.begin() + words );
  for ( auto var = g.num_inputs() + 1u; var < g.num_vars(); ++var )
  {
    auto const& n = g.node( var );
    auto const* a = values.data() + std::size_t( lit_var( n.fanin0 ) ) * words;
    auto const* b = values.data() + std::size_t( lit_var( n.fanin1 ) ) * words;
    auto const ca = lit_is_complemented( n.fanin0 ) ? ~uint64_t( 0 ) : uint64_t( 0 );
    auto const cb = lit_is_complemented( n.fanin1 ) ? ~uint64_t( 0 ) : uint64_t( 0 );
    auto* out = values.data() + std::size_t( var ) * words;
    for ( std::size_t w = 0; w < words; ++w )
    {
      out[w] = ( a[w] ^ ca ) & ( b[w] ^ cb );
    }
  }
  return values;
}

std::vector<uint64_t> simulate_outputs( aig const& g, std::span<uint64_t const> input_words, std::size_t words )
{
  auto const values = simulate_words( g, input_words, words );
  std::vector<uint64_t> outs( std::size_t( g.num_outputs() ) * words );
  for ( uint32_t o = 0; o < g.num_outputs(); ++o )
  {
    auto const l = g.output( o );
    auto const c = lit_is_complemented( l ) ? ~uint64_t( 0 ) : uint64_t( 0 );
    for ( std::size_t w = 0; w < words; ++w )
    {
      outs[o * words + w] = values[std::size_t( lit_var( l ) ) * words + w] ^ c;
    }
  }
  return outs;
}

std::vector<bool> simulate( aig const& g, std::vector<bool> const& inputs )
{
  if ( inputs.size() != g.num_inputs() )
  {
    throw aig_error( "simulate: expected " + std::to_string( g.num_inputs() ) + " inputs, got " + std::to_string( inputs.size() ) );
  }
  std::vector<uint64_t> words( inputs.size() );
  for ( std::size_t i = 0; i < inputs.size(); ++i )
  {
    words[i] = inputs[i] ? 1u : 0u;
  }
  auto const outs = simulate_outputs( g, words, 1 );
  std::vector<bool> result( outs.size() );
  for ( std::size_t o = 0; o < outs.size(); ++o )
  {
    result[o] = ( outs[o] & 1u ) != 0u;
  }
  return result;
}

std::vector<uint64_t> exhaustive_patterns( uint32_t num_inputs, std::size_t first_word, std::size_t words )
{
  std::vector<uint64_t> patterns( std::size_t( num_inputs ) * words );
  for ( uint32_t i = 0; i < num_inputs; ++i )
  {
    for ( std::size_t w = 0; w < words; ++w )
    {
      if ( i < 6 )
      {
        patterns[i * words + w] = elementary[i];
      }
      else
      {
        patterns[i * words + w] = ( ( first_word + w ) >> ( i - 6 ) ) & 1u ? ~uint64_t( 0 ) : uint64_t( 0 );
      }
    }
  }
  return patterns;
}

namespace
{

std::vector<bool> witness_from( std::vector<uint64_t> const& patterns, std::size_t words, uint32_t num_inputs, std::size_t word, int bit )
{
  std::vector<bool> witness( num_inputs );
  for ( uint32_t i = 0; i < num_inputs; ++i )
  {
    witness[i] = ( ( patterns[i * words + word] >> bit ) & 1u ) != 0u;
  }
  return witness;
}

/* compares one block of patterns; returns true and fills the witness on mismatch */
bool compare_block( aig const& a, aig const& b, std::vector<uint64_t> const& patterns, std::size_t words,
                    uint64_t last_mask, std::vector<bool>& witness )
{
  auto const oa = simulate_outputs( a, patterns, words );
  auto const ob = simulate_outputs( b, patterns, words );
  for ( std::size_t w = 0; w < words; ++w )
  {
    uint64_t diff = 0;
    for ( uint32_t o = 0; o < a.num_outputs(); ++o )
    {
      diff |= oa[o * words + w] ^ ob[o * words + w];
    }
    if ( w + 1 == words )
    {
      diff &= last_mask;
    }
    if ( diff )
    {
      witness = witness_from( patterns, words, a.num_inputs(), w, __builtin_ctzll( diff ) );
      return true;
    }
  }
  return false;
}

} // namespace

equivalence_result equivalent( aig const& a, aig const& b, equivalence_mode mode )
{
  if ( a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() )
  {
    throw aig_error( "equivalence check: I/O arity mismatch" );
  }
  equivalence_result result;
  auto const n = a.num_inputs();
  constexpr std::size_t block = 64;

  if ( mode.type == equivalence_mode::kind::exhaustive )
  {
    if ( n > max_exhaustive_inputs )
    {
      throw aig_error( "exhaustive equivalence requested for " + std::to_string( n ) + " inputs (limit 16)" );
    }
    uint64_t const total = uint64_t( 1 ) << n;
    std::size_t const total_words = std::max<std::size_t>( 1u, total / 64u );
    uint64_t const last_mask = total >= 64 ? ~uint64_t( 0 ) : ( ( uint64_t( 1 ) << total ) - 1u );
    for ( std::size_t first = 0; first < total_words; first += block )
    {
      auto const words = std::min( block, total_words - first );
      auto const patterns = exhaustive_patterns( n, first, words );
      bool const last = first + words == total_words;
      if ( compare_block( a, b, patterns, words, last ? last_mask : ~uint64_t( 0 ), result.witness ) )
      {
        result.outcome = equivalence_result::verdict::not_equal;
        return result;
      }
    }
    result.vectors_checked = total;
    result.outcome = equivalence_result::verdict::equal;
    return result;
  }

  std::mt19937_64 rng( mode.seed );
  uint64_t remaining = mode.vectors;
  while ( remaining > 0 )
  {
    auto const vectors = std::min<uint64_t>( remaining, block * 64u );
    auto const words = static_cast<std::size_t>( ( vectors + 63u ) / 64u );
    std::vector<uint64_t> patterns( std::size_t( n ) * words );
    for ( auto& p : patterns )
    {
      p = rng();
    }
    uint64_t const tail = vectors % 64u;
    uint64_t const last_mask = tail == 0 ? ~uint64_t( 0 ) : ( ( uint64_t( 1 ) << tail ) - 1u );
    if ( compare_block( a, b, patterns, words, last_mask, result.witness ) )
    {
      result.outcome = equivalence_result::verdict::not_equal;
      return result;
    }
    remaining -= vectors;
    result.vectors_checked += vectors;
  }
  result.outcome = equivalence_result::verdict::probably_equal;
  return result;
}

equivalence_result check_equivalence( aig const& a, aig const& b, uint64_t seed )
{
  if ( a.num_inputs() <= max_exhaustive_inputs )
  {
    return equivalent( a, b );
  }
  return equivalent( a, b, equivalence_mode::random( 10000, seed ) );
}

} // namespace secsyn
