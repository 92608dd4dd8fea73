#pragma once

#include <secsyn/aig.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace secsyn
{

enum class cell_kind : uint8_t
{
  inv,
  and2,
  nand2,
  or2,
  nor2,
  xor2
};

enum class vt_class : uint8_t
{
  lvt,
  rvt,
  hvt
};

constexpr uint32_t num_cell_kinds = 6u;
constexpr uint32_t num_vt_classes = 3u;

struct cell_kind_info
{
  char const* name;
  uint32_t arity;
  uint8_t function; /* bit s = output for input state s (input 0 is the low bit) */
  double area;
  double delay;
  double base_leakage;
};

cell_kind_info const& kind_info( cell_kind k );
char const* vt_name( vt_class v );
cell_kind parse_cell_kind( std::string const& name );
vt_class parse_vt_class( std::string const& name );

class techlib_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct library_params
{
  uint64_t seed{ 1 };
  std::array<double, num_vt_classes> leakage_scale{ 10.0, 3.0, 1.0 };
  std::array<double, num_vt_classes> delay_scale{ 0.7, 1.0, 1.4 };
  double alpha{ 0.25 };              /* leakage growth per input one */
  double jitter{ 0.05 };             /* seeded table jitter, +-fraction */
  double instance_variation{ 0.05 }; /* per-instance process variation, +-fraction */
};

struct library_cell
{
  cell_kind kind;
  vt_class vt;
  double area;
  double delay;
  std::vector<double> leakage; /* indexed by input state */

  double mean_leakage() const;
};

class cell_library
{
public:
  cell_library() = default;
  cell_library( library_params params, std::vector<library_cell> cells );

  library_params const& params() const { return params_; }
  library_cell const& cell( cell_kind k, vt_class v ) const;
  std::vector<library_cell> const& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  /*! \brief Leakage of gate instance `instance` in input state `state`, including process variation. */
  double instance_leakage( cell_kind k, vt_class v, uint32_t instance, uint32_t state ) const;

private:
  library_params params_;
  std::vector<library_cell> cells_;
};

/*! \brief Deterministic synthetic multi-VT library.
 *
 * `leakage(kind, vt, s) = base(kind) * leakage_scale(vt) * (1 + alpha * ones(s)) * (1 + j(kind, s))`
 * with `j` uniform in `[-jitter, jitter]`, shared by all VT classes.
 */
cell_library generate_library( library_params const& params );

std::string library_to_json( cell_library const& lib );
cell_library library_from_json( std::string const& text );

/* nets 0 and 1 are the constants, nets 2.. are primary inputs, then gate outputs */
constexpr uint32_t net_const0 = 0u;
constexpr uint32_t net_const1 = 1u;

struct gate
{
  cell_kind kind;
  vt_class vt;
  std::array<uint32_t, 2> inputs; /* second entry unused for INV */
  uint32_t output;
};

class netlist
{
public:
  netlist() = default;
  explicit netlist( uint32_t num_inputs ) : num_inputs_( num_inputs ), num_nets_( 2u + num_inputs ) {}

  uint32_t num_inputs() const { return num_inputs_; }
  uint32_t num_nets() const { return num_nets_; }
  uint32_t input_net( uint32_t i ) const { return 2u + i; }
  std::vector<gate> const& gates() const { return gates_; }
  std::vector<gate>& gates() { return gates_; }
  std::vector<uint32_t> const& outputs() const { return outputs_; }
  std::vector<uint32_t>& outputs() { return outputs_; }

  /*! \brief Appends a gate driven by existing nets; returns its output net. */
  uint32_t add_gate( cell_kind k, vt_class v, uint32_t a, uint32_t b = 0u );
  void add_output( uint32_t net );

  /* net -> index of the driving gate, or -1 for constants and inputs */
  std::vector<int32_t> drivers() const;

private:
  uint32_t num_inputs_{ 0 };
  uint32_t num_nets_{ 2 };
  std::vector<gate> gates_;
  std::vector<uint32_t> outputs_;
};

/*! \brief Bit-parallel evaluation: returns `num_nets * words` words, net-major. */
std::vector<uint64_t> simulate_nets( netlist const& n, std::span<uint64_t const> input_words, std::size_t words );
std::vector<bool> simulate( netlist const& n, std::vector<bool> const& inputs );

/*! \brief Input state of a gate (input 0 is the low bit) from net values of one lane. */
inline uint32_t gate_state( gate const& g, std::vector<uint8_t> const& net_values )
{
  if ( g.kind == cell_kind::inv )
    return net_values[g.inputs[0]];
  return uint32_t( net_values[g.inputs[0]] ) | ( uint32_t( net_values[g.inputs[1]] ) << 1 );
}

/*! \brief Functionally equivalent AIG of the netlist (for equivalence checking). */
aig to_aig( netlist const& n );

struct vt_policy
{
  double critical_fraction{ 0.9 }; /* paths at least this long (relative to the critical delay) go LVT */
  double relaxed_fraction{ 0.5 };  /* slack above this fraction of the critical delay goes HVT */
};

/*! \brief Technology mapping with greedy pattern covering and slack-driven VT assignment. */
netlist map_aig( aig const& g, cell_library const& lib, vt_policy const& policy = {} );

/*! \brief Re-assigns VT classes by slack computed with RVT delays. */
void assign_vt( netlist& n, cell_library const& lib, vt_policy const& policy );

struct ppa_report
{
  double area{ 0 };
  double delay{ 0 };
  double static_power{ 0 };
};

ppa_report ppa( netlist const& n, cell_library const& lib );

/*! \brief Arrival time of every net using per-cell delays scaled by VT. */
std::vector<double> arrival_times( netlist const& n, cell_library const& lib, bool nominal_vt = false );

struct feature_vector
{
  double f1_overall_diversity{ 0 };
  double f2_lvt_area_pct{ 0 };
  double f3_hvt_area_pct{ 0 };

  bool operator==( feature_vector const& ) const = default;
};

feature_vector extract_features( netlist const& n, cell_library const& lib );

/*! \brief Line-per-gate text dump: `g<index> <cell>_<vt> <in0> [<in1>] -> <out>`. */
std::string dump_netlist( netlist const& n );

} // namespace secsyn
