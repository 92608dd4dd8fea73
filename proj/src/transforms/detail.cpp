#include "detail.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <unordered_map>

namespace secsyn::detail
{

namespace
{

uint64_t isop_rec( uint64_t lower, uint64_t upper, uint32_t num_vars, std::vector<cube>& cover )
{
  if ( lower == 0u )
    return 0u;
  if ( upper == ~uint64_t( 0 ) )
  {
    cover.push_back( {} );
    return ~uint64_t( 0 );
  }
  uint32_t var = num_vars;
  while ( var-- > 0 )
  {
    if ( tt_has_var( lower, var ) || tt_has_var( upper, var ) )
      break;
  }
  auto const l0 = tt_cofactor0( lower, var );
  auto const l1 = tt_cofactor1( lower, var );
  auto const u0 = tt_cofactor0( upper, var );
  auto const u1 = tt_cofactor1( upper, var );

  auto const start0 = cover.size();
  auto const f0 = isop_rec( l0 & ~u1, u0, num_vars, cover );
  for ( auto i = start0; i < cover.size(); ++i )
    cover[i].negative |= uint8_t( 1u << var );
  auto const start1 = cover.size();
  auto const f1 = isop_rec( l1 & ~u0, u1, num_vars, cover );
  for ( auto i = start1; i < cover.size(); ++i )
    cover[i].positive |= uint8_t( 1u << var );
  auto const fs = isop_rec( ( l0 & ~f0 ) | ( l1 & ~f1 ), u0 & u1, num_vars, cover );
  return ( f0 & ~var_masks[var] ) | ( f1 & var_masks[var] ) | fs;
}

literal balanced_and( aig& sub, std::vector<literal> lits )
{
  if ( lits.empty() )
    return lit_true;
  while ( lits.size() > 1 )
  {
    std::vector<literal> next;
    for ( std::size_t i = 0; i + 1 < lits.size(); i += 2 )
      next.push_back( sub.add_and( lits[i], lits[i + 1] ) );
    if ( lits.size() % 2 )
      next.push_back( lits.back() );
    lits = std::move( next );
  }
  return lits.front();
}

literal balanced_or( aig& sub, std::vector<literal> lits )
{
  for ( auto& l : lits )
    l = lit_not( l );
  return lit_not( balanced_and( sub, std::move( lits ) ) );
}

literal cube_literal( aig& sub, cube c )
{
  std::vector<literal> lits;
  for ( uint32_t v = 0; v < 8; ++v )
  {
    if ( c.positive & ( 1u << v ) )
      lits.push_back( sub.input( v ) );
    if ( c.negative & ( 1u << v ) )
      lits.push_back( lit_not( sub.input( v ) ) );
  }
  return balanced_and( sub, std::move( lits ) );
}

literal factor_rec( aig& sub, std::vector<cube> const& cubes )
{
  if ( cubes.empty() )
    return lit_false;
  for ( auto const& c : cubes )
  {
    if ( c.positive == 0 && c.negative == 0 )
      return lit_true;
  }
  if ( cubes.size() == 1 )
    return cube_literal( sub, cubes.front() );

  uint32_t best_count = 0, best_var = 0;
  bool best_positive = true;
  for ( uint32_t v = 0; v < 8; ++v )
  {
    uint32_t pos = 0, neg = 0;
    for ( auto const& c : cubes )
    {
      pos += ( c.positive >> v ) & 1u;
      neg += ( c.negative >> v ) & 1u;
    }
    if ( pos > best_count )
    {
      best_count = pos, best_var = v, best_positive = true;
    }
    if ( neg > best_count )
    {
      best_count = neg, best_var = v, best_positive = false;
    }
  }
  if ( best_count <= 1 )
  {
    std::vector<literal> terms;
    for ( auto const& c : cubes )
      terms.push_back( cube_literal( sub, c ) );
    return balanced_or( sub, std::move( terms ) );
  }

  uint8_t const bit = uint8_t( 1u << best_var );
  std::vector<cube> quotient, remainder;
  for ( auto c : cubes )
  {
    if ( best_positive ? ( c.positive & bit ) : ( c.negative & bit ) )
    {
      ( best_positive ? c.positive : c.negative ) &= uint8_t( ~bit );
      quotient.push_back( c );
    }
    else
    {
      remainder.push_back( c );
    }
  }
  auto const divisor = lit_not_cond( sub.input( best_var ), !best_positive );
  auto const product = sub.add_and( divisor, factor_rec( sub, quotient ) );
  if ( remainder.empty() )
    return product;
  return sub.add_or( product, factor_rec( sub, remainder ) );
}

/* memoized decomposition choices for all 4-input functions */
enum class decomposition : uint8_t
{
  constant,
  variable,
  and_positive,
  and_negative,
  or_positive,
  or_negative,
  exclusive_or,
  multiplexer
};

struct choice
{
  decomposition op{ decomposition::constant };
  uint8_t var{ 0 };
  uint8_t complemented{ 0 };
  uint16_t cost{ 0 };
};

class decomposition_table
{
public:
  decomposition_table()
  {
    for ( uint32_t t = 0; t < 65536u; ++t )
      solve( uint16_t( t ) );
  }

  choice const& operator[]( uint16_t tt ) const { return table_[tt]; }

private:
  choice const& solve( uint16_t tt )
  {
    auto& entry = table_[tt];
    if ( solved_[tt] )
      return entry;
    solved_[tt] = true;
    if ( tt == 0u || tt == 0xffffu )
    {
      entry = { decomposition::constant, 0, uint8_t( tt ? 1 : 0 ), 0 };
      return entry;
    }
    for ( uint8_t v = 0; v < 4; ++v )
    {
      auto const m = uint16_t( var_masks[v] );
      if ( tt == m || tt == uint16_t( ~m ) )
      {
        entry = { decomposition::variable, v, uint8_t( tt == m ? 0 : 1 ), 0 };
        return entry;
      }
    }
    auto const full = tt_replicate( tt, 4 );
    choice best{ decomposition::multiplexer, 0, 0, 0xffff };
    auto consider = [&]( decomposition op, uint8_t v, uint32_t cost ) {
      if ( cost < best.cost )
        best = { op, v, 0, uint16_t( cost ) };
    };
    for ( uint8_t v = 0; v < 4; ++v )
    {
      if ( !tt_has_var( full, v ) )
        continue;
      auto const f0 = uint16_t( tt_cofactor0( full, v ) );
      auto const f1 = uint16_t( tt_cofactor1( full, v ) );
      if ( f0 == 0u )
        consider( decomposition::and_positive, v, 1u + solve( f1 ).cost );
      if ( f1 == 0u )
        consider( decomposition::and_negative, v, 1u + solve( f0 ).cost );
      if ( f1 == 0xffffu )
        consider( decomposition::or_positive, v, 1u + solve( f0 ).cost );
      if ( f0 == 0xffffu )
        consider( decomposition::or_negative, v, 1u + solve( f1 ).cost );
      if ( f1 == uint16_t( ~f0 ) )
        consider( decomposition::exclusive_or, v, 3u + solve( f0 ).cost );
      consider( decomposition::multiplexer, v, 3u + solve( f0 ).cost + solve( f1 ).cost );
    }
    table_[tt] = best;
    return table_[tt];
  }

  std::array<choice, 65536> table_{};
  std::array<bool, 65536> solved_{};
};

decomposition_table const& decompositions()
{
  static decomposition_table const table;
  return table;
}

literal build_decomposition( aig& sub, uint16_t tt )
{
  auto const& c = decompositions()[tt];
  auto const full = tt_replicate( tt, 4 );
  auto const x = c.op == decomposition::constant ? lit_false : sub.input( c.var );
  auto cof0 = [&]() { return build_decomposition( sub, uint16_t( tt_cofactor0( full, c.var ) ) ); };
  auto cof1 = [&]() { return build_decomposition( sub, uint16_t( tt_cofactor1( full, c.var ) ) ); };
  switch ( c.op )
  {
  case decomposition::constant:
    return c.complemented ? lit_true : lit_false;
  case decomposition::variable:
    return lit_not_cond( x, c.complemented );
  case decomposition::and_positive:
    return sub.add_and( x, cof1() );
  case decomposition::and_negative:
    return sub.add_and( lit_not( x ), cof0() );
  case decomposition::or_positive:
    return sub.add_or( x, cof0() );
  case decomposition::or_negative:
    return sub.add_or( lit_not( x ), cof1() );
  case decomposition::exclusive_or:
    return sub.add_xor( x, cof0() );
  case decomposition::multiplexer:
  {
    auto const then_lit = cof1();
    auto const else_lit = cof0();
    return sub.add_mux( x, then_lit, else_lit );
  }
  }
  return lit_false;
}

} // namespace

std::vector<cube> isop( uint64_t tt, uint32_t num_vars )
{
  std::vector<cube> cover;
  auto const full = tt_replicate( tt & tt_mask( num_vars ), num_vars );
  isop_rec( full, full, num_vars, cover );
  return cover;
}

literal build_factored( aig& sub, std::vector<cube> const& cover )
{
  return factor_rec( sub, cover );
}

aig synthesize_sop( uint64_t tt, uint32_t num_vars )
{
  aig direct( num_vars );
  direct.add_output( build_factored( direct, isop( tt, num_vars ) ) );
  aig inverted( num_vars );
  inverted.add_output( lit_not( build_factored( inverted, isop( ~tt, num_vars ) ) ) );
  direct = direct.cleanup();
  inverted = inverted.cleanup();
  return inverted.num_ands() < direct.num_ands() ? inverted : direct;
}

aig const& synthesize_decomposition( uint16_t tt )
{
  thread_local std::unordered_map<uint16_t, aig> cache;
  auto it = cache.find( tt );
  if ( it == cache.end() )
  {
    aig sub( 4 );
    sub.add_output( build_decomposition( sub, tt ) );
    it = cache.emplace( tt, sub.cleanup() ).first;
  }
  return it->second;
}

std::vector<aig> const& rewrite_candidates( uint16_t tt )
{
  thread_local std::unordered_map<uint16_t, std::vector<aig>> cache;
  auto it = cache.find( tt );
  if ( it != cache.end() )
    return it->second;
  std::vector<aig> candidates{ synthesize_decomposition( tt ) };
  aig inverted( 4 );
  inverted.add_output( lit_not( build_decomposition( inverted, uint16_t( ~tt ) ) ) );
  candidates.push_back( inverted.cleanup() );
  candidates.push_back( synthesize_sop( tt, 4 ) );
  std::vector<aig> unique;
  for ( auto& c : candidates )
  {
    if ( std::none_of( unique.begin(), unique.end(), [&]( aig const& u ) { return u.structurally_equal( c ); } ) )
      unique.push_back( std::move( c ) );
  }
  return cache.emplace( tt, std::move( unique ) ).first->second;
}

uint32_t decomposition_cost( uint16_t tt )
{
  return decompositions()[tt].cost;
}

std::vector<uint32_t> reconvergent_cut( aig const& g, uint32_t root, uint32_t max_leaves, marker& visited, std::vector<uint32_t>& cone )
{
  visited.next();
  cone.clear();
  cone.push_back( root );
  visited.mark( root );
  std::vector<uint32_t> leaves;
  auto const& r = g.node( root );
  for ( auto l : { r.fanin0, r.fanin1 } )
  {
    if ( !visited.marked( lit_var( l ) ) )
    {
      visited.mark( lit_var( l ) );
      leaves.push_back( lit_var( l ) );
    }
  }
  while ( true )
  {
    int best_cost = 3;
    std::size_t best = leaves.size();
    for ( std::size_t i = 0; i < leaves.size(); ++i )
    {
      auto const v = leaves[i];
      if ( !g.is_and( v ) )
        continue;
      auto const& n = g.node( v );
      int const cost = int( !visited.marked( lit_var( n.fanin0 ) ) ) + int( !visited.marked( lit_var( n.fanin1 ) ) ) - 1;
      if ( cost < best_cost || ( cost == best_cost && v > leaves[best] ) )
      {
        best_cost = cost;
        best = i;
      }
    }
    if ( best == leaves.size() || int( leaves.size() ) + best_cost > int( max_leaves ) )
      break;
    auto const v = leaves[best];
    leaves.erase( leaves.begin() + std::ptrdiff_t( best ) );
    cone.push_back( v );
    auto const& n = g.node( v );
    for ( auto l : { n.fanin0, n.fanin1 } )
    {
      if ( !visited.marked( lit_var( l ) ) )
      {
        visited.mark( lit_var( l ) );
        leaves.push_back( lit_var( l ) );
      }
    }
  }
  std::sort( leaves.begin(), leaves.end() );
  std::sort( cone.begin(), cone.end() );
  return leaves;
}

std::vector<uint32_t> bounded_mffc( aig const& g, uint32_t root, std::vector<uint32_t>& refs, marker const& leaves )
{
  std::vector<uint32_t> nodes{ root };
  for ( std::size_t i = 0; i < nodes.size(); ++i )
  {
    auto const& n = g.node( nodes[i] );
    for ( auto l : { n.fanin0, n.fanin1 } )
    {
      auto const u = lit_var( l );
      if ( !g.is_and( u ) || leaves.marked( u ) )
        continue;
      if ( --refs[u] == 0u )
        nodes.push_back( u );
    }
  }
  for ( auto v : nodes )
  {
    auto const& n = g.node( v );
    for ( auto l : { n.fanin0, n.fanin1 } )
    {
      auto const u = lit_var( l );
      if ( g.is_and( u ) && !leaves.marked( u ) )
        ++refs[u];
    }
  }
  return nodes;
}

uint32_t insertion_cost( aig const& target, aig const& sub, std::span<literal const> leaves, std::span<uint32_t const> doomed, uint32_t* fresh )
{
  std::vector<literal> map( sub.num_vars(), lit_false );
  std::vector<uint8_t> known( sub.num_vars(), 1u );
  for ( uint32_t i = 0; i < sub.num_inputs(); ++i )
    map[i + 1u] = leaves[i];
  uint32_t cost = 0, created = 0;
  for ( auto var = sub.num_inputs() + 1u; var < sub.num_vars(); ++var )
  {
    auto const& n = sub.node( var );
    if ( known[lit_var( n.fanin0 )] && known[lit_var( n.fanin1 )] )
    {
      auto const a = lit_not_cond( map[lit_var( n.fanin0 )], lit_is_complemented( n.fanin0 ) );
      auto const b = lit_not_cond( map[lit_var( n.fanin1 )], lit_is_complemented( n.fanin1 ) );
      if ( auto found = target.find_and( a, b ) )
      {
        map[var] = *found;
        if ( std::find( doomed.begin(), doomed.end(), lit_var( *found ) ) != doomed.end() )
          ++cost;
        continue;
      }
    }
    known[var] = 0u;
    ++cost;
    ++created;
  }
  if ( fresh )
    *fresh = created;
  return cost;
}

literal insert_subgraph( aig& target, aig const& sub, std::span<literal const> leaves )
{
  std::vector<literal> map( sub.num_vars(), lit_false );
  for ( uint32_t i = 0; i < sub.num_inputs(); ++i )
    map[i + 1u] = leaves[i];
  for ( auto var = sub.num_inputs() + 1u; var < sub.num_vars(); ++var )
  {
    auto const& n = sub.node( var );
    map[var] = target.add_and( lit_not_cond( map[lit_var( n.fanin0 )], lit_is_complemented( n.fanin0 ) ),
                               lit_not_cond( map[lit_var( n.fanin1 )], lit_is_complemented( n.fanin1 ) ) );
  }
  auto const out = sub.output( 0 );
  return lit_not_cond( map[lit_var( out )], lit_is_complemented( out ) );
}

aig accept_if_not_larger( aig const& original, aig candidate )
{
  candidate = candidate.cleanup();
  if ( candidate.num_ands() > original.num_ands() )
    return original.cleanup();
  return candidate;
}

} // namespace secsyn::detail
