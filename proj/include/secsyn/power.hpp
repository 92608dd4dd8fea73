#pragma once

#include <secsyn/techlib.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace secsyn
{

enum class countermeasure_kind : uint8_t
{
  none,
  elb,
  quadseal
};

char const* countermeasure_name( countermeasure_kind k );
countermeasure_kind parse_countermeasure( std::string const& name );

/*! \brief How the plaintext is presented to the netlist and where the S-box output is read.
 *
 * Netlist input `i` receives plaintext bit `input_bit[i] ^ input_invert[i]`.
 */
struct design_phase
{
  std::vector<uint8_t> input_bit;
  std::vector<uint8_t> input_invert;
  std::array<uint32_t, 8> output_net{};
  std::array<uint8_t, 8> output_invert{};
};

/*! \brief Gate-level one-byte AES target computing `SBOX(pt ^ key)`.
 *
 * The netlist contains the mapped S-box logic plus the output capture
 * stage (register input load on every S-box output bit).  Trace `t` is
 * taken in phase `t % phases.size()`.
 */
struct crypto_design
{
  netlist circuit;
  uint8_t key{ 0 };
  countermeasure_kind countermeasure{ countermeasure_kind::none };
  uint32_t instances{ 1 };
  std::vector<design_phase> phases;
};

class design_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct capture_params
{
  uint32_t loads{ 64 };            /* INV-equivalent register loads per output bit */
  std::optional<vt_class> vt;      /* empty: the VT of the gate driving the output */
};

/*! \brief Wraps a mapped 8-in/8-out S-box netlist (key folded in) and appends the capture stage. */
crypto_design make_crypto_design( netlist n, uint8_t key, capture_params const& capture = {} );

/*! \brief Functional S-box output of the design for one plaintext in one phase. */
uint8_t evaluate( crypto_design const& d, uint8_t pt, uint32_t phase = 0 );

/*! \brief Netlist input words for the given plaintexts (lane `t` = trace `first_trace + t`). */
std::vector<uint64_t> design_input_words( crypto_design const& d, std::vector<uint8_t> const& plaintexts, std::size_t first_trace, std::size_t lanes );

uint32_t hamming_weight( uint8_t b );

struct trace_set
{
  std::vector<uint8_t> plaintexts;
  std::vector<double> traces;
  double sigma{ 0 };
  uint64_t seed{ 0 };
};

/*! \brief Zero-delay static power: per trace, the sum of instance leakage of every cell plus N(0, sigma^2). */
trace_set simulate_traces( crypto_design const& d, cell_library const& lib, std::vector<uint8_t> const& plaintexts, double sigma, uint64_t seed );

/*! \brief Noise-free leakage of every trace (the deterministic part of simulate_traces). */
std::vector<double> leakage_samples( crypto_design const& d, cell_library const& lib, std::vector<uint8_t> const& plaintexts );

class attack_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Pearson correlation; throws attack_error on length mismatch, fewer than 2 samples or zero variance. */
double pearson( std::vector<double> const& x, std::vector<double> const& y );

struct key_score
{
  uint8_t key;
  double correlation; /* |rho| */
};

struct cpa_result
{
  std::vector<key_score> ranking; /* 256 entries, best first */
  bool degenerate{ false };       /* all traces equal */

  /* 1-based rank of `key` */
  uint32_t rank_of( uint8_t key ) const;
};

/*! \brief CPA with hypotheses `HW(SBOX(pt ^ k))`, ranked by |rho| with ties to the smaller key. */
cpa_result cpa_attack( trace_set const& t );
cpa_result cpa_attack( std::vector<uint8_t> const& plaintexts, std::vector<double> const& traces );

struct attack_config
{
  double sigma{ 0 };
  uint32_t cap{ 20000 };
  uint32_t first_count{ 16 };
  double coarse_factor{ 2.0 };
  uint32_t trials_coarse{ 32 };
  uint32_t trials{ 128 };
  uint32_t thorough_steps{ 16 }; /* thorough grid points per coarse bracket */
  double target_rate{ 0.9 };
  uint64_t seed{ 1 };
};

void validate_attack_config( attack_config const& cfg );

struct curve_point
{
  uint32_t trace_count;
  double success_rate;
  uint32_t trials; /* trials run; fewer than requested once the target became unreachable */
  bool thorough;
};

struct pt_score_report
{
  std::optional<uint32_t> pt_score; /* empty when censored */
  uint32_t cap{ 0 };
  uint32_t trials{ 0 };
  double target_rate{ 0 };
  std::vector<curve_point> success_curve; /* ascending trace counts */

  bool censored() const { return !pt_score.has_value(); }
  /* pt_score, or the cap for censored reports */
  uint32_t value_or_cap() const { return pt_score.value_or( cap ); }
};

/*! \brief Success rate of rank-1 key recovery over `trials` independent attacks with `count` traces each. */
double success_rate( crypto_design const& d, cell_library const& lib, attack_config const& cfg, uint32_t count, uint32_t trials );

/*! \brief Coarse geometric then thorough linear search for the smallest trace count reaching the target rate. */
pt_score_report pt_score( crypto_design const& d, cell_library const& lib, attack_config const& cfg );

std::string traces_to_csv( trace_set const& t );
std::string report_to_csv( pt_score_report const& r );

} // namespace secsyn
