#include <secsyn/aes.hpp>
#include <secsyn/power.hpp>
#include <secsyn/seeding.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace secsyn
{

namespace
{

/* hypothesis[k][pt] = HW(SBOX(pt ^ k)) */
std::array<std::array<uint8_t, 256>, 256> const& hypotheses()
{
  static auto const table = []() {
    std::array<std::array<uint8_t, 256>, 256> h{};
    auto const& s = aes_sbox();
    for ( uint32_t k = 0; k < 256u; ++k )
    {
      for ( uint32_t pt = 0; pt < 256u; ++pt )
        h[k][pt] = uint8_t( hamming_weight( s[pt ^ k] ) );
    }
    return h;
  }();
  return table;
}

} // namespace

double pearson( std::vector<double> const& x, std::vector<double> const& y )
{
  if ( x.size() != y.size() )
    throw attack_error( "pearson: length mismatch" );
  if ( x.size() < 2u )
    throw attack_error( "pearson: need at least 2 samples" );
  double mx = 0, my = 0;
  for ( std::size_t i = 0; i < x.size(); ++i )
  {
    mx += x[i];
    my += y[i];
  }
  mx /= double( x.size() );
  my /= double( y.size() );
  double sxy = 0, sxx = 0, syy = 0;
  for ( std::size_t i = 0; i < x.size(); ++i )
  {
    sxy += ( x[i] - mx ) * ( y[i] - my );
    sxx += ( x[i] - mx ) * ( x[i] - mx );
    syy += ( y[i] - my ) * ( y[i] - my );
  }
  if ( sxx == 0 || syy == 0 )
    throw attack_error( "pearson: zero variance" );
  return std::clamp( sxy / std::sqrt( sxx * syy ), -1.0, 1.0 );
}

uint32_t cpa_result::rank_of( uint8_t key ) const
{
  for ( uint32_t i = 0; i < ranking.size(); ++i )
  {
    if ( ranking[i].key == key )
      return i + 1u;
  }
  return uint32_t( ranking.size() ) + 1u;
}

cpa_result cpa_attack( std::vector<uint8_t> const& plaintexts, std::vector<double> const& traces )
{
  if ( plaintexts.size() != traces.size() )
    throw attack_error( "cpa: plaintext and trace counts differ" );
  if ( traces.size() < 2u )
    throw attack_error( "cpa: need at least 2 traces" );
  auto const n = double( traces.size() );
  double mean = 0;
  for ( auto t : traces )
    mean += t;
  mean /= n;

  /* aggregate centered traces by plaintext */
  std::array<double, 256> count{}, sum{};
  double syy = 0;
  bool all_equal = true;
  for ( std::size_t i = 0; i < traces.size(); ++i )
  {
    auto const c = traces[i] - mean;
    count[plaintexts[i]] += 1.0;
    sum[plaintexts[i]] += c;
    syy += c * c;
    all_equal = all_equal && traces[i] == traces[0];
  }

  cpa_result r;
  r.degenerate = all_equal || syy == 0;
  r.ranking.resize( 256 );
  auto const& h = hypotheses();
  for ( uint32_t k = 0; k < 256u; ++k )
  {
    double sh = 0, shh = 0, shy = 0;
    for ( uint32_t pt = 0; pt < 256u; ++pt )
    {
      if ( count[pt] == 0 )
        continue;
      double const v = h[k][pt];
      sh += count[pt] * v;
      shh += count[pt] * v * v;
      shy += sum[pt] * v;
    }
    auto const sxx = shh - sh * sh / n;
    double rho = 0;
    if ( !r.degenerate && sxx > 1e-12 )
      rho = std::fabs( shy / std::sqrt( sxx * syy ) );
    r.ranking[k] = { uint8_t( k ), std::min( rho, 1.0 ) };
  }
  std::stable_sort( r.ranking.begin(), r.ranking.end(), []( key_score const& a, key_score const& b ) { return a.correlation > b.correlation; } );
  return r;
}

cpa_result cpa_attack( trace_set const& t )
{
  return cpa_attack( t.plaintexts, t.traces );
}

void validate_attack_config( attack_config const& cfg )
{
  if ( !( cfg.sigma >= 0 ) || !std::isfinite( cfg.sigma ) )
    throw attack_error( "attack: sigma must be finite and non-negative" );
  if ( cfg.cap < 2u )
    throw attack_error( "attack: cap must be at least 2 traces" );
  if ( cfg.first_count < 2u )
    throw attack_error( "attack: the smallest grid point must be at least 2 traces" );
  if ( !( cfg.coarse_factor > 1.0 ) )
    throw attack_error( "attack: coarse grid factor must exceed 1" );
  if ( cfg.trials == 0u || cfg.trials_coarse == 0u || cfg.thorough_steps == 0u )
    throw attack_error( "attack: trial and step counts must be positive" );
  if ( !( cfg.target_rate > 0 && cfg.target_rate <= 1 ) )
    throw attack_error( "attack: target rate must be in (0, 1]" );
}

namespace
{

struct trial_outcome
{
  uint32_t successes{ 0 };
  uint32_t trials{ 0 };
};

/* with `stop_early`, trials end once the target rate is out of reach */
trial_outcome run_trials( crypto_design const& d, cell_library const& lib, attack_config const& cfg, uint32_t count, uint32_t trials, bool stop_early )
{
  if ( count < 2u || trials == 0u )
    throw attack_error( "success_rate: need at least 2 traces and 1 trial" );
  auto const needed = uint32_t( std::ceil( cfg.target_rate * double( trials ) - 1e-9 ) );
  trial_outcome r;
  std::vector<uint8_t> pts( count );
  for ( uint32_t trial = 0; trial < trials; ++trial )
  {
    if ( stop_early && r.successes + ( trials - trial ) < needed )
      break;
    auto const trial_seed = derive_seed( cfg.seed, { count, trial } );
    std::mt19937_64 rng( trial_seed );
    for ( auto& p : pts )
      p = uint8_t( rng() >> 56 );
    auto const t = simulate_traces( d, lib, pts, cfg.sigma, derive_seed( trial_seed, { 0x9015eu } ) );
    auto const a = cpa_attack( t );
    ++r.trials;
    if ( !a.degenerate && a.ranking.front().key == d.key )
      ++r.successes;
  }
  return r;
}

} // namespace

double success_rate( crypto_design const& d, cell_library const& lib, attack_config const& cfg, uint32_t count, uint32_t trials )
{
  auto const r = run_trials( d, lib, cfg, count, trials, false );
  return double( r.successes ) / double( r.trials );
}

pt_score_report pt_score( crypto_design const& d, cell_library const& lib, attack_config const& cfg )
{
  validate_attack_config( cfg );
  pt_score_report rep;
  rep.cap = cfg.cap;
  rep.trials = cfg.trials;
  rep.target_rate = cfg.target_rate;

  std::vector<uint32_t> grid;
  for ( double c = std::min( cfg.first_count, cfg.cap ); ; c = std::ceil( c * cfg.coarse_factor ) )
  {
    if ( c >= double( cfg.cap ) )
    {
      grid.push_back( cfg.cap );
      break;
    }
    grid.push_back( uint32_t( c ) );
  }

  auto measure = [&]( uint32_t count, uint32_t trials, bool thorough ) {
    auto const r = run_trials( d, lib, cfg, count, trials, true );
    auto const rate = double( r.successes ) / double( r.trials );
    rep.success_curve.push_back( { count, rate, r.trials, thorough } );
    return r.trials == trials && rate >= cfg.target_rate;
  };

  /* coarse phase: first grid point reaching the target */
  std::size_t hit = grid.size();
  for ( std::size_t i = 0; i < grid.size(); ++i )
  {
    if ( measure( grid[i], cfg.trials_coarse, false ) )
    {
      hit = i;
      break;
    }
  }

  /* thorough phase: linear refinement of the bracket, moving up the grid if the full trial count misses */
  for ( ; hit < grid.size() && !rep.pt_score; ++hit )
  {
    uint32_t const lo = hit == 0 ? 1u : grid[hit - 1];
    uint32_t const hi = grid[hit];
    uint32_t const step = std::max<uint32_t>( ( hi - lo ) / cfg.thorough_steps, 1u );
    for ( uint32_t c = lo + step; ; c += step )
    {
      c = std::min( c, hi );
      if ( c >= 2u && measure( c, cfg.trials, true ) )
      {
        rep.pt_score = c;
        break;
      }
      if ( c == hi )
        break;
    }
  }

  std::stable_sort( rep.success_curve.begin(), rep.success_curve.end(), []( curve_point const& a, curve_point const& b ) {
    return a.trace_count < b.trace_count || ( a.trace_count == b.trace_count && !a.thorough && b.thorough );
  } );
  return rep;
}

std::string report_to_csv( pt_score_report const& r )
{
  std::ostringstream os;
  os << "trace_count,success_rate,trials,phase\n";
  for ( auto const& p : r.success_curve )
    os << p.trace_count << ',' << p.success_rate << ',' << p.trials << ',' << ( p.thorough ? "thorough" : "coarse" ) << '\n';
  os << "# pt_score=" << ( r.censored() ? "CENSORED(" + std::to_string( r.cap ) + ")" : std::to_string( *r.pt_score ) )
     << " target_rate=" << r.target_rate << " trials=" << r.trials << '\n';
  return os.str();
}

} // namespace secsyn
