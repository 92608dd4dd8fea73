#include <secsyn/transforms.hpp>

#include "detail.hpp"

namespace secsyn
{

namespace
{

constexpr uint32_t refactor_leaves = 6u;

uint64_t cone_function( aig const& g, uint32_t root, std::vector<uint32_t> const& leaves, std::vector<uint32_t> const& cone, std::vector<uint64_t>& scratch )
{
  for ( uint32_t i = 0; i < leaves.size(); ++i )
    scratch[leaves[i]] = detail::var_masks[i];
  for ( auto v : cone )
  {
    auto const& n = g.node( v );
    auto const a = scratch[lit_var( n.fanin0 )] ^ ( lit_is_complemented( n.fanin0 ) ? ~uint64_t( 0 ) : 0u );
    auto const b = scratch[lit_var( n.fanin1 )] ^ ( lit_is_complemented( n.fanin1 ) ? ~uint64_t( 0 ) : 0u );
    scratch[v] = a & b;
  }
  return scratch[root];
}

} // namespace

aig refactor( aig const& g, bool zero_cost )
{
  auto refs = g.fanout_counts();
  aig result( g.num_inputs() );
  std::vector<literal> map( g.num_vars(), lit_false );
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
    map[i + 1u] = result.input( i );

  detail::marker visited( g.num_vars() );
  detail::marker leaf_marks( g.num_vars() );
  std::vector<uint64_t> scratch( g.num_vars(), 0u );
  std::vector<uint32_t> cone, doomed;
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
    auto const leaves = detail::reconvergent_cut( g, var, refactor_leaves, visited, cone );
    leaf_marks.next();
    for ( auto l : leaves )
      leaf_marks.mark( l );
    auto const mffc = detail::bounded_mffc( g, var, refs, leaf_marks );
    if ( mffc.size() < 2u )
    {
      map[var] = plain();
      continue;
    }
    auto const tt = cone_function( g, var, leaves, cone, scratch );
    auto const sub = detail::synthesize_sop( tt, uint32_t( leaves.size() ) );
    std::vector<literal> leaf_lits;
    for ( auto l : leaves )
      leaf_lits.push_back( map[l] );
    doomed.clear();
    for ( auto v : mffc )
    {
      if ( v != var )
        doomed.push_back( lit_var( map[v] ) );
    }
    uint32_t fresh = 0;
    int const gain = int( mffc.size() ) - int( detail::insertion_cost( result, sub, leaf_lits, doomed, &fresh ) );
    if ( gain > 0 || ( zero_cost && gain == 0 && fresh > 1u ) )
      map[var] = detail::insert_subgraph( result, sub, leaf_lits );
    else
      map[var] = plain();
  }
  for ( auto o : g.outputs() )
    result.add_output( lit_not_cond( map[lit_var( o )], lit_is_complemented( o ) ) );
  return detail::accept_if_not_larger( g, std::move( result ) );
}

} // namespace secsyn
