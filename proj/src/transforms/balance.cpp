#include <secsyn/transforms.hpp>

#include "detail.hpp"

#include <algorithm>

namespace secsyn
{

namespace
{

uint64_t tie_key( uint64_t seed, literal l )
{
  if ( seed == 0u )
    return l;
  uint64_t x = seed ^ ( uint64_t( l ) * 0x9e3779b97f4a7c15ULL );
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 29;
  return x;
}

class balancer
{
public:
  balancer( aig const& g, uint64_t seed ) : g_( g ), seed_( seed ), result_( g.num_inputs() ), map_( g.num_vars(), lit_false ), fanouts_( g.fanout_counts() )
  {
    levels_.assign( 1u + g.num_inputs(), 0u );
    for ( uint32_t i = 0; i < g.num_inputs(); ++i )
      map_[i + 1u] = result_.input( i );
  }

  aig run()
  {
    std::vector<uint8_t> needed( g_.num_vars(), 0u );
    std::vector<std::vector<literal>> supergates( g_.num_vars() );
    for ( auto o : g_.outputs() )
      needed[lit_var( o )] = 1u;
    for ( auto var = g_.num_vars(); var-- > g_.num_inputs() + 1u; )
    {
      if ( !needed[var] )
        continue;
      supergates[var] = collect( var );
      for ( auto l : supergates[var] )
        needed[lit_var( l )] = 1u;
    }
    for ( auto var = g_.num_inputs() + 1u; var < g_.num_vars(); ++var )
    {
      if ( needed[var] )
        map_[var] = build( supergates[var] );
    }
    for ( auto o : g_.outputs() )
      result_.add_output( lit_not_cond( map_[lit_var( o )], lit_is_complemented( o ) ) );
    return detail::accept_if_not_larger( g_, std::move( result_ ) );
  }

private:
  /* leaves of the multi-input AND rooted at `root`, expanding single-fanout uncomplemented ANDs */
  std::vector<literal> collect( uint32_t root ) const
  {
    std::vector<literal> leaves;
    std::vector<literal> stack{ g_.node( root ).fanin1, g_.node( root ).fanin0 };
    while ( !stack.empty() )
    {
      auto const l = stack.back();
      stack.pop_back();
      auto const v = lit_var( l );
      if ( !lit_is_complemented( l ) && g_.is_and( v ) && fanouts_[v] == 1u )
      {
        stack.push_back( g_.node( v ).fanin1 );
        stack.push_back( g_.node( v ).fanin0 );
      }
      else
      {
        leaves.push_back( l );
      }
    }
    return leaves;
  }

  uint32_t level_of( literal l ) const { return levels_[lit_var( l )]; }

  literal add( literal a, literal b )
  {
    auto const r = result_.add_and( a, b );
    if ( lit_var( r ) == levels_.size() )
      levels_.push_back( 1u + std::max( level_of( a ), level_of( b ) ) );
    return r;
  }

  literal build( std::vector<literal> const& old_leaves )
  {
    std::vector<literal> ops;
    ops.reserve( old_leaves.size() );
    for ( auto l : old_leaves )
      ops.push_back( lit_not_cond( map_[lit_var( l )], lit_is_complemented( l ) ) );
    std::sort( ops.begin(), ops.end() );
    ops.erase( std::unique( ops.begin(), ops.end() ), ops.end() );
    for ( std::size_t i = 0; i + 1 < ops.size(); ++i )
    {
      if ( ops[i] == lit_false || lit_var( ops[i] ) == lit_var( ops[i + 1] ) )
        return lit_false;
    }
    if ( !ops.empty() && ops.front() == lit_false )
      return lit_false;
    ops.erase( std::remove( ops.begin(), ops.end(), lit_true ), ops.end() );
    if ( ops.empty() )
      return lit_true;

    /* pair the two shallowest operands until one remains */
    auto deeper = [&]( literal a, literal b ) {
      auto const la = level_of( a ), lb = level_of( b );
      if ( la != lb )
        return la > lb;
      auto const ka = tie_key( seed_, a ), kb = tie_key( seed_, b );
      return ka != kb ? ka > kb : a > b;
    };
    while ( ops.size() > 1u )
    {
      std::sort( ops.begin(), ops.end(), deeper );
      auto const a = ops.back();
      ops.pop_back();
      auto const b = ops.back();
      ops.pop_back();
      ops.push_back( add( a, b ) );
    }
    return ops.front();
  }

  aig const& g_;
  uint64_t seed_;
  aig result_;
  std::vector<literal> map_;
  std::vector<uint32_t> fanouts_;
  std::vector<uint32_t> levels_;
};

} // namespace

aig balance( aig const& g, uint64_t seed )
{
  return balancer( g, seed ).run();
}

} // namespace secsyn
