#include <secsyn/transforms.hpp>

#include "detail.hpp"

#include <algorithm>

namespace secsyn
{

namespace
{

constexpr std::size_t max_divisors = 64u;
constexpr std::size_t max_pair_candidates = 24u;

class resubstitutor
{
public:
  resubstitutor( aig const& g, uint32_t max_leaves, bool zero_cost )
      : g_( g ), max_leaves_( max_leaves ), zero_cost_( zero_cost ),
        refs_( g.fanout_counts() ), fanouts_( g.num_vars() ), visited_( g.num_vars() ), leaf_marks_( g.num_vars() ), window_( g.num_vars() ),
        slot_( g.num_vars(), 0u ), result_( g.num_inputs() ), map_( g.num_vars(), lit_false )
  {
    for ( auto var = g.num_inputs() + 1u; var < g.num_vars(); ++var )
    {
      fanouts_[lit_var( g.node( var ).fanin0 )].push_back( var );
      fanouts_[lit_var( g.node( var ).fanin1 )].push_back( var );
    }
    for ( uint32_t i = 0; i < g.num_inputs(); ++i )
      map_[i + 1u] = result_.input( i );
  }

  aig run()
  {
    for ( auto var = g_.num_inputs() + 1u; var < g_.num_vars(); ++var )
      map_[var] = refs_[var] == 0u ? plain( var ) : resubstitute( var );
    for ( auto o : g_.outputs() )
      result_.add_output( lit_not_cond( map_[lit_var( o )], lit_is_complemented( o ) ) );
    return detail::accept_if_not_larger( g_, std::move( result_ ) );
  }

private:
  literal mapped( literal l ) const { return lit_not_cond( map_[lit_var( l )], lit_is_complemented( l ) ); }

  literal plain( uint32_t var )
  {
    auto const& n = g_.node( var );
    return result_.add_and( mapped( n.fanin0 ), mapped( n.fanin1 ) );
  }

  uint64_t const* tt( uint32_t var ) const { return sim_.data() + std::size_t( slot_[var] ) * words_; }

  void simulate_node( uint32_t var )
  {
    auto const& n = g_.node( var );
    auto const ca = lit_is_complemented( n.fanin0 ) ? ~uint64_t( 0 ) : uint64_t( 0 );
    auto const cb = lit_is_complemented( n.fanin1 ) ? ~uint64_t( 0 ) : uint64_t( 0 );
    slot_[var] = uint32_t( sim_.size() / words_ );
    sim_.resize( sim_.size() + words_ );
    auto* out = sim_.data() + std::size_t( slot_[var] ) * words_;
    auto const* a = tt( lit_var( n.fanin0 ) );
    auto const* b = tt( lit_var( n.fanin1 ) );
    for ( std::size_t w = 0; w < words_; ++w )
      out[w] = ( a[w] ^ ca ) & ( b[w] ^ cb );
  }

  void simulate_leaf( uint32_t var, uint32_t index )
  {
    slot_[var] = uint32_t( sim_.size() / words_ );
    for ( std::size_t w = 0; w < words_; ++w )
    {
      if ( index < 6u )
        sim_.push_back( detail::var_masks[index] );
      else
        sim_.push_back( ( w >> ( index - 6u ) ) & 1u ? ~uint64_t( 0 ) : uint64_t( 0 ) );
    }
  }

  bool equal( uint64_t const* a, uint64_t const* b, bool complement ) const
  {
    auto const c = complement ? ~uint64_t( 0 ) : uint64_t( 0 );
    for ( std::size_t w = 0; w < words_; ++w )
    {
      if ( ( ( a[w] ^ c ) & mask_ ) != ( b[w] & mask_ ) )
        return false;
    }
    return true;
  }

  bool is_constant( uint64_t const* a, bool value ) const
  {
    auto const expected = value ? mask_ : uint64_t( 0 );
    for ( std::size_t w = 0; w < words_; ++w )
    {
      if ( ( a[w] & mask_ ) != expected )
        return false;
    }
    return true;
  }

  /* true if `x` (complemented by cx) implies the target (complemented by ct) */
  bool implies( uint64_t const* x, bool cx, uint64_t const* t, bool ct ) const
  {
    auto const mx = cx ? ~uint64_t( 0 ) : uint64_t( 0 );
    auto const mt = ct ? ~uint64_t( 0 ) : uint64_t( 0 );
    for ( std::size_t w = 0; w < words_; ++w )
    {
      if ( ( ( x[w] ^ mx ) & ~( t[w] ^ mt ) ) & mask_ )
        return false;
    }
    return true;
  }

  literal resubstitute( uint32_t root )
  {
    std::vector<uint32_t> cone;
    auto const leaves = detail::reconvergent_cut( g_, root, max_leaves_, visited_, cone );
    leaf_marks_.next();
    for ( auto l : leaves )
      leaf_marks_.mark( l );
    auto const mffc = detail::bounded_mffc( g_, root, refs_, leaf_marks_ );
    int const mffc_size = int( mffc.size() );

    auto const num_leaves = uint32_t( leaves.size() );
    words_ = std::max<std::size_t>( 1u, ( std::size_t( 1 ) << num_leaves ) / 64u );
    mask_ = num_leaves >= 6u ? ~uint64_t( 0 ) : detail::tt_mask( num_leaves );
    sim_.clear();
    sim_.reserve( words_ * ( leaves.size() + cone.size() + max_divisors + 4u ) );

    /* window membership: leaves, cone, and nodes depending only on them */
    window_.next();
    for ( uint32_t i = 0; i < num_leaves; ++i )
    {
      window_.mark( leaves[i] );
      simulate_leaf( leaves[i], i );
    }
    for ( auto v : cone )
    {
      window_.mark( v );
      simulate_node( v );
    }
    detail::marker& in_mffc = visited_;
    in_mffc.next();
    for ( auto v : mffc )
      in_mffc.mark( v );

    std::vector<uint32_t> divisors;
    for ( auto l : leaves )
      divisors.push_back( l );
    for ( auto v : cone )
    {
      if ( !in_mffc.marked( v ) && divisors.size() < max_divisors )
        divisors.push_back( v );
    }
    /* extend with fanouts of window nodes whose fanins are both inside the window */
    for ( std::size_t i = 0; i < divisors.size() && divisors.size() < max_divisors; ++i )
    {
      for ( auto f : fanouts_[divisors[i]] )
      {
        if ( f >= root || window_.marked( f ) || divisors.size() >= max_divisors )
          continue;
        auto const& n = g_.node( f );
        if ( window_.marked( lit_var( n.fanin0 ) ) && window_.marked( lit_var( n.fanin1 ) ) )
        {
          window_.mark( f );
          simulate_node( f );
          divisors.push_back( f );
        }
      }
    }
    auto const* target = tt( root );
    if ( is_constant( target, false ) )
      return lit_false;
    if ( is_constant( target, true ) )
      return lit_true;

    /* zero-resubstitution: an existing divisor already computes the root */
    for ( auto d : divisors )
    {
      for ( bool c : { false, true } )
      {
        if ( equal( tt( d ), target, c ) && ( mffc_size > 0 ) )
          return lit_not_cond( map_[d], c );
      }
    }

    /* one-resubstitution: root = d1 & d2 or d1 | d2 over complemented divisors */
    int const gain = mffc_size - 1;
    if ( gain < 0 || ( gain == 0 && !zero_cost_ ) )
      return plain( root );
    for ( bool or_form : { false, true } )
    {
      /* AND form needs divisors implied by the root; OR form divisors implying it */
      std::vector<std::pair<uint32_t, bool>> candidates;
      for ( auto d : divisors )
      {
        for ( bool c : { false, true } )
        {
          bool const ok = or_form ? implies( tt( d ), c, target, false ) : implies( target, false, tt( d ), c );
          if ( ok && candidates.size() < max_pair_candidates )
            candidates.emplace_back( d, c );
        }
      }
      for ( std::size_t i = 0; i < candidates.size(); ++i )
      {
        for ( std::size_t j = i + 1; j < candidates.size(); ++j )
        {
          auto const [d1, c1] = candidates[i];
          auto const [d2, c2] = candidates[j];
          if ( d1 == d2 )
            continue;
          if ( !covers( tt( d1 ), c1, tt( d2 ), c2, target, or_form ) )
            continue;
          auto const a = lit_not_cond( map_[d1], c1 );
          auto const b = lit_not_cond( map_[d2], c2 );
          return or_form ? result_.add_or( a, b ) : result_.add_and( a, b );
        }
      }
    }
    return plain( root );
  }

  bool covers( uint64_t const* a, bool ca, uint64_t const* b, bool cb, uint64_t const* t, bool or_form ) const
  {
    auto const ma = ca ? ~uint64_t( 0 ) : uint64_t( 0 );
    auto const mb = cb ? ~uint64_t( 0 ) : uint64_t( 0 );
    for ( std::size_t w = 0; w < words_; ++w )
    {
      auto const x = a[w] ^ ma, y = b[w] ^ mb;
      auto const v = or_form ? ( x | y ) : ( x & y );
      if ( ( v ^ t[w] ) & mask_ )
        return false;
    }
    return true;
  }

  aig const& g_;
  uint32_t max_leaves_;
  bool zero_cost_;
  std::size_t words_{ 1 };
  std::vector<uint32_t> refs_;
  std::vector<std::vector<uint32_t>> fanouts_;
  detail::marker visited_, leaf_marks_, window_;
  std::vector<uint32_t> slot_;
  std::vector<uint64_t> sim_;
  uint64_t mask_{ ~uint64_t( 0 ) };
  aig result_;
  std::vector<literal> map_;
};

} // namespace

aig resubstitute( aig const& g, uint32_t max_leaves, bool zero_cost )
{
  if ( max_leaves < 2u || max_leaves > 16u )
    throw recipe_error( "resub cut size must be in [2, 16]" );
  return resubstitutor( g, max_leaves, zero_cost ).run();
}

} // namespace secsyn
