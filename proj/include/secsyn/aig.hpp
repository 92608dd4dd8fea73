#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace secsyn
{

/*! \brief AIG literal: `2 * variable + complement`.
 *
 * Variable 0 is the constant-false node, variables `1..num_inputs` are the
 * primary inputs, and the remaining variables are AND nodes in topological
 * order.
 */
using literal = uint32_t;

constexpr literal lit_false = 0u;
constexpr literal lit_true = 1u;

constexpr uint32_t lit_var( literal l ) { return l >> 1; }
constexpr bool lit_is_complemented( literal l ) { return ( l & 1u ) != 0u; }
constexpr literal make_lit( uint32_t var, bool complemented = false ) { return ( var << 1 ) | ( complemented ? 1u : 0u ); }
constexpr literal lit_not( literal l ) { return l ^ 1u; }
constexpr literal lit_not_cond( literal l, bool c ) { return l ^ ( c ? 1u : 0u ); }
constexpr literal lit_regular( literal l ) { return l & ~1u; }

class aig_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct and_node
{
  literal fanin0; /* always the smaller literal */
  literal fanin1;
};

struct aig_stats
{
  uint32_t and_count{ 0 };
  uint32_t depth{ 0 };
  uint32_t input_count{ 0 };
  uint32_t output_count{ 0 };

  bool operator==( aig_stats const& ) const = default;
};

/*! \brief Combinational and-inverter graph with structural hashing.
 *
 * All primary inputs are created up front, so AND nodes always follow the
 * inputs in variable order and every AND node's fanins have smaller
 * variable indices than the node itself.
 */
class aig
{
public:
  aig() = default;
  explicit aig( uint32_t num_inputs );

  uint32_t num_inputs() const { return num_inputs_; }
  uint32_t num_outputs() const { return static_cast<uint32_t>( outputs_.size() ); }
  uint32_t num_ands() const { return static_cast<uint32_t>( ands_.size() ); }
  uint32_t num_vars() const { return 1u + num_inputs_ + num_ands(); }

  bool is_constant( uint32_t var ) const { return var == 0u; }
  bool is_input( uint32_t var ) const { return var >= 1u && var <= num_inputs_; }
  bool is_and( uint32_t var ) const { return var > num_inputs_ && var < num_vars(); }

  literal input( uint32_t index ) const;
  and_node const& node( uint32_t var ) const { return ands_[var - num_inputs_ - 1u]; }
  std::vector<literal> const& outputs() const { return outputs_; }
  literal output( uint32_t index ) const { return outputs_.at( index ); }

  /*! \brief Creates (or reuses) the AND of two literals.
   *
   * Applies the folds `x&0=0`, `x&1=x`, `x&x=x`, `x&!x=0` before looking
   * the unordered pair up in the structural hash table.
   */
  literal add_and( literal a, literal b );

  /*! \brief Looks up the AND of two literals without creating it. */
  std::optional<literal> find_and( literal a, literal b ) const;

  literal add_or( literal a, literal b ) { return lit_not( add_and( lit_not( a ), lit_not( b ) ) ); }
  literal add_xor( literal a, literal b );
  literal add_mux( literal sel, literal then_lit, literal else_lit );

  void add_output( literal l );
  void set_output( uint32_t index, literal l );

  /*! \brief Returns a copy that keeps only nodes reachable from the outputs. */
  aig cleanup() const;

  /*! \brief Number of fanout references of every variable (AND fanins plus outputs). */
  std::vector<uint32_t> fanout_counts() const;

  /*! \brief Logic level of every variable (inputs and constant at level 0). */
  std::vector<uint32_t> levels() const;

  bool structurally_equal( aig const& other ) const;

private:
  void check_literal( literal l ) const;
  static uint64_t key_of( literal a, literal b ) { return ( uint64_t( a ) << 32 ) | b; }
  void rehash( std::size_t capacity );
  std::size_t slot_of( uint64_t key ) const;

  uint32_t num_inputs_{ 0 };
  std::vector<and_node> ands_;
  std::vector<literal> outputs_;

  /* open-addressing strash table; 0 marks an empty slot (no valid key is 0) */
  std::vector<uint64_t> table_keys_;
  std::vector<uint32_t> table_vars_;
};

aig_stats stats( aig const& g );

/*! \brief Parses an ASCII AIGER ("aag") document into a structurally hashed AIG.
 *
 * Only combinational documents (latch count 0) are accepted.  Throws
 * `aig_error` on malformed input.
 */
aig parse_aiger( std::string_view text );
std::string serialize_aiger( aig const& g );

aig read_aiger_file( std::string const& path );
void write_aiger_file( aig const& g, std::string const& path );

} // namespace secsyn
