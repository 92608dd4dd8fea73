#pragma once

#include <secsyn/power.hpp>
#include <secsyn/simulation.hpp>

#include <array>
#include <cstdint>

namespace secsyn
{

/* companion input pins driven by one complement-generation inverter */
constexpr uint32_t elb_complement_fanout = 4u;

/*! \brief Exhaustive logic balancing.
 *
 * Every 1-input gate gains a companion fed with its complemented input;
 * every 2-input gate gains three companions covering the remaining input
 * complement combinations.  Complements are generated by added inverters
 * at the VT of the net's driver, each feeding at most
 * `elb_complement_fanout` companion pins.  Companions drive load-only
 * nets, so the function is unchanged.
 */
netlist apply_elb( netlist const& n, cell_library const& lib );
crypto_design apply_elb( crypto_design const& d, cell_library const& lib );

/*! \brief De Morgan dual: computes `~f(~x)` gate by gate (AND2 <-> OR2, NAND2 <-> NOR2, XOR2 -> XOR2 + INV). */
netlist dual_netlist( netlist const& n );

/*! \brief Input and output polarity of each of the four instances in one rotation phase. */
struct quadseal_phase
{
  std::array<uint8_t, 4> input_invert;
  uint32_t read_instance;
  bool read_invert;
};

/*! \brief The rotation schedule: instances 0 and 2 are the original logic, 1 and 3 its dual. */
std::array<quadseal_phase, 4> const& quadseal_schedule();

/*! \brief QuadSeal-style balancing: four S-box instances with a public rotation counter.
 *
 * `schedule_length` phases (1..4) of the fixed rotation are used, trace `t`
 * being taken in phase `t % schedule_length`.
 */
crypto_design apply_quadseal( crypto_design const& d, cell_library const& lib, uint32_t schedule_length = 4 );

crypto_design apply_countermeasure( crypto_design const& d, cell_library const& lib, countermeasure_kind k );

/*! \brief Exhaustive functional comparison of two netlists with equal arity. */
equivalence_result verify_countermeasure( netlist const& original, netlist const& protected_netlist );

/*! \brief Every phase of `protected_design` against phase 0 of `original` over all 256 plaintexts. */
struct design_check
{
  bool equal{ true };
  uint32_t phase{ 0 };
  uint8_t plaintext{ 0 };
};
design_check verify_countermeasure( crypto_design const& original, crypto_design const& protected_design );

} // namespace secsyn
