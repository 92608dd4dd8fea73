#include <secsyn/aig.hpp>

#include <algorithm>
#include <utility>

namespace secsyn
{

namespace
{

inline uint64_t mix64( uint64_t x )
{
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

} // namespace

aig::aig( uint32_t num_inputs ) : num_inputs_( num_inputs )
{
  rehash( 64 );
}

literal aig::input( uint32_t index ) const
{
  if ( index >= num_inputs_ )
  {
    throw aig_error( "input index " + std::to_string( index ) + " out of range" );
  }
  return make_lit( index + 1u );
}

void aig::check_literal( literal l ) const
{
  if ( lit_var( l ) >= num_vars() )
  {
    throw aig_error( "literal " + std::to_string( l ) + " references a missing variable" );
  }
}

std::size_t aig::slot_of( uint64_t key ) const
{
  auto const mask = table_keys_.size() - 1u;
  auto slot = static_cast<std::size_t>( mix64( key ) ) & mask;
  while ( table_keys_[slot] != 0u && table_keys_[slot] != key )
  {
    slot = ( slot + 1u ) & mask;
  }
  return slot;
}

void aig::rehash( std::size_t capacity )
{
  std::size_t size = 64;
  while ( size < capacity )
  {
    size <<= 1;
  }
  table_keys_.assign( size, 0u );
  table_vars_.assign( size, 0u );
  for ( uint32_t i = 0; i < ands_.size(); ++i )
  {
    auto const key = key_of( ands_[i].fanin0, ands_[i].fanin1 );
    auto const slot = slot_of( key );
    table_keys_[slot] = key;
    table_vars_[slot] = num_inputs_ + 1u + i;
  }
}

std::optional<literal> aig::find_and( literal a, literal b ) const
{
  if ( a > b )
  {
    std::swap( a, b );
  }
  if ( a == lit_false )
    return lit_false;
  if ( a == lit_true )
    return b;
  if ( a == b )
    return a;
  if ( a == lit_not( b ) )
    return lit_false;
  if ( table_keys_.empty() )
    return std::nullopt;
  auto const key = key_of( a, b );
  auto const slot = slot_of( key );
  if ( table_keys_[slot] == key )
  {
    return make_lit( table_vars_[slot] );
  }
  return std::nullopt;
}

literal aig::add_and( literal a, literal b )
{
  check_literal( a );
  check_literal( b );
  if ( auto existing = find_and( a, b ) )
  {
    return *existing;
  }
  if ( a > b )
  {
    std::swap( a, b );
  }
  if ( 2u * ( ands_.size() + 1u ) > table_keys_.size() )
  {
    rehash( table_keys_.size() * 2u );
  }
  auto const var = num_vars();
  ands_.push_back( { a, b } );
  auto const key = key_of( a, b );
  auto const slot = slot_of( key );
  table_keys_[slot] = key;
  table_vars_[slot] = var;
  return make_lit( var );
}

literal aig::add_xor( literal a, literal b )
{
  auto const both = add_and( a, b );
  auto const none = add_and( lit_not( a ), lit_not( b ) );
  return add_and( lit_not( both ), lit_not( none ) );
}

literal aig::add_mux( literal sel, literal then_lit, literal else_lit )
{
  return add_or( add_and( sel, then_lit ), add_and( lit_not( sel ), else_lit ) );
}

void aig::add_output( literal l )
{
  check_literal( l );
  outputs_.push_back( l );
}

void aig::set_output( uint32_t index, literal l )
{
  check_literal( l );
  outputs_.at( index ) = l;
}

std::vector<uint32_t> aig::fanout_counts() const
{
  std::vector<uint32_t> refs( num_vars(), 0u );
  for ( auto const& n : ands_ )
  {
    ++refs[lit_var( n.fanin0 )];
    ++refs[lit_var( n.fanin1 )];
  }
  for ( auto o : outputs_ )
  {
    ++refs[lit_var( o )];
  }
  return refs;
}

std::vector<uint32_t> aig::levels() const
{
  std::vector<uint32_t> level( num_vars(), 0u );
  for ( uint32_t i = 0; i < ands_.size(); ++i )
  {
    auto const& n = ands_[i];
    level[num_inputs_ + 1u + i] = 1u + std::max( level[lit_var( n.fanin0 )], level[lit_var( n.fanin1 )] );
  }
  return level;
}

aig aig::cleanup() const
{
  std::vector<uint8_t> reachable( num_vars(), 0u );
  for ( auto o : outputs_ )
  {
    reachable[lit_var( o )] = 1u;
  }
  for ( auto var = num_vars(); var-- > num_inputs_ + 1u; )
  {
    if ( reachable[var] )
    {
      auto const& n = node( var );
      reachable[lit_var( n.fanin0 )] = 1u;
      reachable[lit_var( n.fanin1 )] = 1u;
    }
  }

  aig result( num_inputs_ );
  std::vector<literal> map( num_vars(), lit_false );
  for ( uint32_t i = 0; i < num_inputs_; ++i )
  {
    map[i + 1u] = result.input( i );
  }
  for ( auto var = num_inputs_ + 1u; var < num_vars(); ++var )
  {
    if ( !reachable[var] )
      continue;
    auto const& n = node( var );
    map[var] = result.add_and( lit_not_cond( map[lit_var( n.fanin0 )], lit_is_complemented( n.fanin0 ) ),
                               lit_not_cond( map[lit_var( n.fanin1 )], lit_is_complemented( n.fanin1 ) ) );
  }
  for ( auto o : outputs_ )
  {
    result.add_output( lit_not_cond( map[lit_var( o )], lit_is_complemented( o ) ) );
  }
  return result;
}

bool aig::structurally_equal( aig const& other ) const
{
  if ( num_inputs_ != other.num_inputs_ || outputs_ != other.outputs_ || ands_.size() != other.ands_.size() )
    return false;
  for ( std::size_t i = 0; i < ands_.size(); ++i )
  {
    if ( ands_[i].fanin0 != other.ands_[i].fanin0 || ands_[i].fanin1 != other.ands_[i].fanin1 )
      return false;
  }
  return true;
}

aig_stats stats( aig const& g )
{
  aig_stats s;
  s.and_count = g.num_ands();
  s.input_count = g.num_inputs();
  s.output_count = g.num_outputs();
  auto const level = g.levels();
  for ( auto o : g.outputs() )
  {
    s.depth = std::max( s.depth, level[lit_var( o )] );
  }
  return s;
}

} // namespace secsyn
