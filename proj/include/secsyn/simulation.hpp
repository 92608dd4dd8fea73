#pragma once

#include <secsyn/aig.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace secsyn
{

/*! \brief Evaluates the AIG on one input assignment. */
std::vector<bool> simulate( aig const& g, std::vector<bool> const& inputs );

/*! \brief Bit-parallel simulation.
 *
 * `input_words` holds `num_inputs * words` patterns, input-major.  Returns
 * `num_vars * words` words, variable-major, so callers can read internal
 * node values as well as outputs.
 */
std::vector<uint64_t> simulate_words( aig const& g, std::span<uint64_t const> input_words, std::size_t words );

/*! \brief Output words only: `num_outputs * words`, output-major. */
std::vector<uint64_t> simulate_outputs( aig const& g, std::span<uint64_t const> input_words, std::size_t words );

/*! \brief Input pattern words enumerating all assignments with index in `[first_word*64, (first_word+words)*64)`. */
std::vector<uint64_t> exhaustive_patterns( uint32_t num_inputs, std::size_t first_word, std::size_t words );

constexpr uint32_t max_exhaustive_inputs = 16u;

struct equivalence_mode
{
  enum class kind
  {
    exhaustive,
    random
  };
  kind type{ kind::exhaustive };
  uint64_t vectors{ 10000 };
  uint64_t seed{ 1 };

  static equivalence_mode exhaustive() { return {}; }
  static equivalence_mode random( uint64_t n, uint64_t seed ) { return { kind::random, n, seed }; }
};

struct equivalence_result
{
  enum class verdict
  {
    equal,
    not_equal,
    probably_equal
  };
  verdict outcome{ verdict::equal };
  std::vector<bool> witness; /* set for not_equal */
  uint64_t vectors_checked{ 0 };

  bool holds() const { return outcome != verdict::not_equal; }
};

/*! \brief Functional comparison of two AIGs with identical I/O arity.
 *
 * Exhaustive mode is limited to 16 inputs; random mode draws seeded
 * vectors.  A mismatch always comes with a concrete witness.
 */
equivalence_result equivalent( aig const& a, aig const& b, equivalence_mode mode = equivalence_mode::exhaustive() );

/*! \brief Exhaustive when the input count allows it, otherwise 10 000 random vectors. */
equivalence_result check_equivalence( aig const& a, aig const& b, uint64_t seed = 1 );

} // namespace secsyn
