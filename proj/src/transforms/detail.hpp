#pragma once

#include <secsyn/aig.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

/* Internal helpers shared by the AIG transforms. */

namespace secsyn::detail
{

constexpr uint64_t var_masks[6] = {
    0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
    0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL };

inline uint64_t tt_mask( uint32_t num_vars )
{
  return num_vars >= 6 ? ~uint64_t( 0 ) : ( ( uint64_t( 1 ) << ( 1u << num_vars ) ) - 1u );
}

/* replicates the low 2^num_vars bits over the whole word */
inline uint64_t tt_replicate( uint64_t tt, uint32_t num_vars )
{
  for ( auto v = num_vars; v < 6; ++v )
  {
    auto const shift = 1u << v;
    tt = ( tt & ( ( uint64_t( 1 ) << shift ) - 1u ) ) | ( ( tt & ( ( uint64_t( 1 ) << shift ) - 1u ) ) << shift );
  }
  return tt;
}

inline uint64_t tt_cofactor0( uint64_t tt, uint32_t var )
{
  auto const low = tt & ~var_masks[var];
  return low | ( low << ( 1u << var ) );
}

inline uint64_t tt_cofactor1( uint64_t tt, uint32_t var )
{
  auto const high = tt & var_masks[var];
  return high | ( high >> ( 1u << var ) );
}

inline bool tt_has_var( uint64_t tt, uint32_t var )
{
  return tt_cofactor0( tt, var ) != tt_cofactor1( tt, var );
}

struct cube
{
  uint8_t positive{ 0 };
  uint8_t negative{ 0 };
};

/*! \brief Irredundant sum-of-products of a fully replicated 6-variable truth table. */
std::vector<cube> isop( uint64_t tt, uint32_t num_vars );

/*! \brief Algebraically factored AIG of a cube cover, built into `sub` over its inputs. */
literal build_factored( aig& sub, std::vector<cube> const& cover );

/*! \brief Single-output AIG over `num_vars` inputs from an ISOP of `tt` or its complement (smaller wins). */
aig synthesize_sop( uint64_t tt, uint32_t num_vars );

/*! \brief Small AIG for a 4-input function via recursive decomposition with a memoized cost table. */
aig const& synthesize_decomposition( uint16_t tt );

/*! \brief Alternative structures for a 4-input function: decompositions of it and of its complement, and its factored form. */
std::vector<aig> const& rewrite_candidates( uint16_t tt );

/* node count of `synthesize_decomposition( tt )` before structural sharing */
uint32_t decomposition_cost( uint16_t tt );

/* scratch marks reused across nodes: `stamp[v] == epoch` means marked */
class marker
{
public:
  explicit marker( std::size_t size = 0 ) : stamp_( size, 0u ) {}
  void resize( std::size_t size ) { stamp_.assign( size, 0u ); epoch_ = 0; }
  void next()
  {
    if ( ++epoch_ == 0u )
    {
      std::fill( stamp_.begin(), stamp_.end(), 0u );
      epoch_ = 1;
    }
  }
  void mark( uint32_t v ) { stamp_[v] = epoch_; }
  bool marked( uint32_t v ) const { return stamp_[v] == epoch_; }

private:
  std::vector<uint32_t> stamp_;
  uint32_t epoch_{ 0 };
};

/*! \brief Reconvergence-driven cut of `root` with at most `max_leaves` leaves.
 *
 * `cone` receives the interior nodes (root included) in increasing
 * variable order; the returned leaves are sorted.
 */
std::vector<uint32_t> reconvergent_cut( aig const& g, uint32_t root, uint32_t max_leaves, marker& visited, std::vector<uint32_t>& cone );

/*! \brief Maximum fanout-free cone of `root` bounded by the marked leaves.
 *
 * Uses (and restores) the reference counts in `refs`.  Returns the cone
 * nodes, root included.
 */
std::vector<uint32_t> bounded_mffc( aig const& g, uint32_t root, std::vector<uint32_t>& refs, marker const& leaves );

/*! \brief Number of nodes that inserting `sub` into `target` would create.
 *
 * Existing nodes whose variables are listed in `doomed` (nodes expected to
 * disappear with the replaced cone) count as created: reusing them keeps
 * them alive.  `fresh` receives the number of nodes that do not exist yet.
 */
uint32_t insertion_cost( aig const& target, aig const& sub, std::span<literal const> leaves, std::span<uint32_t const> doomed, uint32_t* fresh = nullptr );

/*! \brief Grafts the single-output `sub` into `target`, returning the output literal. */
literal insert_subgraph( aig& target, aig const& sub, std::span<literal const> leaves );

/* passes never return a network with more AND nodes than their input */
aig accept_if_not_larger( aig const& original, aig candidate );

} // namespace secsyn::detail
