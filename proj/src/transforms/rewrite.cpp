#include <secsyn/transforms.hpp>

#include "detail.hpp"

#include <algorithm>
#include <array>

namespace secsyn
{

namespace
{

constexpr uint32_t cut_size = 4u;
constexpr uint32_t cuts_per_node = 8u;

struct cut
{
  std::array<uint32_t, cut_size> leaves{};
  uint32_t size{ 0 };
  uint16_t tt{ 0 };

  bool dominates( cut const& other ) const
  {
    return size <= other.size && std::includes( other.leaves.begin(), other.leaves.begin() + other.size, leaves.begin(), leaves.begin() + size );
  }
};

bool merge_leaves( cut const& a, cut const& b, cut& out )
{
  uint32_t i = 0, j = 0, k = 0;
  while ( i < a.size || j < b.size )
  {
    uint32_t next;
    if ( j == b.size || ( i < a.size && a.leaves[i] < b.leaves[j] ) )
      next = a.leaves[i++];
    else if ( i == a.size || b.leaves[j] < a.leaves[i] )
      next = b.leaves[j++];
    else
    {
      next = a.leaves[i++];
      ++j;
    }
    if ( k == cut_size )
      return false;
    out.leaves[k++] = next;
  }
  out.size = k;
  return true;
}

/* re-expresses a cut function over a superset of its leaves */
uint16_t stretch( cut const& from, cut const& to )
{
  std::array<uint32_t, cut_size> position{};
  for ( uint32_t i = 0, j = 0; i < from.size; ++i )
  {
    while ( to.leaves[j] != from.leaves[i] )
      ++j;
    position[i] = j;
  }
  uint16_t result = 0;
  for ( uint32_t m = 0; m < 16u; ++m )
  {
    uint32_t index = 0;
    for ( uint32_t i = 0; i < from.size; ++i )
      index |= ( ( m >> position[i] ) & 1u ) << i;
    if ( ( from.tt >> index ) & 1u )
      result |= uint16_t( 1u << m );
  }
  return result;
}

std::vector<std::vector<cut>> enumerate_cuts( aig const& g )
{
  std::vector<std::vector<cut>> cuts( g.num_vars() );
  auto trivial = []( uint32_t v ) {
    cut c;
    c.leaves[0] = v;
    c.size = 1;
    c.tt = 0xaaaa;
    return c;
  };
  for ( uint32_t i = 1; i <= g.num_inputs(); ++i )
    cuts[i].push_back( trivial( i ) );
  cut zero;
  cuts[0].push_back( zero );
  for ( auto var = g.num_inputs() + 1u; var < g.num_vars(); ++var )
  {
    auto const& n = g.node( var );
    auto const& c0 = cuts[lit_var( n.fanin0 )];
    auto const& c1 = cuts[lit_var( n.fanin1 )];
    std::vector<cut> candidates;
    for ( auto const& a : c0 )
    {
      for ( auto const& b : c1 )
      {
        cut m;
        if ( !merge_leaves( a, b, m ) )
          continue;
        auto const ta = uint16_t( stretch( a, m ) ^ ( lit_is_complemented( n.fanin0 ) ? 0xffffu : 0u ) );
        auto const tb = uint16_t( stretch( b, m ) ^ ( lit_is_complemented( n.fanin1 ) ? 0xffffu : 0u ) );
        m.tt = uint16_t( ta & tb );
        candidates.push_back( m );
      }
    }
    std::stable_sort( candidates.begin(), candidates.end(), []( cut const& x, cut const& y ) {
      if ( x.size != y.size )
        return x.size < y.size;
      return std::lexicographical_compare( x.leaves.begin(), x.leaves.begin() + x.size, y.leaves.begin(), y.leaves.begin() + y.size );
    } );
    auto& result = cuts[var];
    for ( auto const& c : candidates )
    {
      if ( result.size() == cuts_per_node )
        break;
      if ( std::none_of( result.begin(), result.end(), [&]( cut const& r ) { return r.dominates( c ); } ) )
        result.push_back( c );
    }
    result.push_back( trivial( var ) );
  }
  return cuts;
}

} // namespace

aig rewrite( aig const& g, bool zero_cost )
{
  auto const cuts = enumerate_cuts( g );
  auto refs = g.fanout_counts();
  aig result( g.num_inputs() );
  std::vector<literal> map( g.num_vars(), lit_false );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    map[i + 1u] = result.input( i );

  detail::marker leaf_marks( g.num_vars() );
  std::vector<uint32_t> doomed;
  for ( auto var = g.num_inputs() + 1u; var < g.num_vars(); ++var )
  {
    auto const& n = g.node( var );
    auto const plain = [&]() {
      return result.add_and( lit_not_cond( map[lit_var( n.fanin0 )], lit_is_complemented( n.fanin0 ) ),
                             lit_not_cond( map[lit_var( n.fanin1 )], lit_is_complemented( n.fanin1 ) ) );
    };
    if ( refs[var] == 0u )
    {
      map[var] = plain();
      continue;
    }
    int best_gain = zero_cost ? 0 : 1;
    aig const* best_sub = nullptr;
    std::array<literal, cut_size> best_leaves{};
    for ( auto const& c : cuts[var] )
    {
      if ( c.size == 1u && c.leaves[0] == var )
        continue;
      leaf_marks.next();
      for ( uint32_t i = 0; i < c.size; ++i )
        leaf_marks.mark( c.leaves[i] );
      auto const mffc = detail::bounded_mffc( g, var, refs, leaf_marks );
      doomed.clear();
      for ( auto v : mffc )
      {
        if ( v != var )
          doomed.push_back( lit_var( map[v] ) );
      }
      std::array<literal, cut_size> leaves{};
      for ( uint32_t i = 0; i < c.size; ++i )
        leaves[i] = map[c.leaves[i]];
      for ( auto const& sub : detail::rewrite_candidates( c.tt ) )
      {
        uint32_t fresh = 0;
        auto const cost = detail::insertion_cost( result, sub, leaves, doomed, &fresh );
        int const gain = int( mffc.size() ) - int( cost );
        /* a zero-gain candidate must restructure more than the root itself */
        if ( gain == 0 && fresh < 2u )
          continue;
        if ( gain >= best_gain && ( best_sub == nullptr || gain > best_gain ) )
        {
          best_gain = gain;
          best_sub = &sub;
          best_leaves = leaves;
        }
      }
    }
    map[var] = best_sub ? detail::insert_subgraph( result, *best_sub, best_leaves ) : plain();
  }
  for ( auto o : g.outputs() )
    result.add_output( lit_not_cond( map[lit_var( o )], lit_is_complemented( o ) ) );
  return detail::accept_if_not_larger( g, std::move( result ) );
}

} // namespace secsyn
