#include <secsyn/techlib.hpp>

#include <algorithm>
#include <limits>
#include <set>

namespace secsyn
{

std::vector<double> arrival_times( netlist const& n, cell_library const& lib, bool nominal_vt )
{
  std::vector<double> arrival( n.num_nets(), 0.0 );
  for ( auto const& g : n.gates() )
  {
    auto const& cell = lib.cell( g.kind, nominal_vt ? vt_class::rvt : g.vt );
    auto t = arrival[g.inputs[0]];
    if ( kind_info( g.kind ).arity == 2u )
      t = std::max( t, arrival[g.inputs[1]] );
    arrival[g.output] = t + cell.delay;
  }
  return arrival;
}

void assign_vt( netlist& n, cell_library const& lib, vt_policy const& policy )
{
  if ( !( policy.critical_fraction > 0 && policy.critical_fraction <= 1 ) || !( policy.relaxed_fraction >= 0 && policy.relaxed_fraction <= 1 ) )
    throw techlib_error( "VT policy fractions must lie in (0, 1]" );
  auto const arrival = arrival_times( n, lib, true );
  double critical = 0;
  for ( auto o : n.outputs() )
    critical = std::max( critical, arrival[o] );

  auto const unconstrained = std::numeric_limits<double>::infinity();
  std::vector<double> required( n.num_nets(), unconstrained );
  for ( auto o : n.outputs() )
    required[o] = critical;
  auto& gates = n.gates();
  for ( auto it = gates.rbegin(); it != gates.rend(); ++it )
  {
    auto const delay = lib.cell( it->kind, vt_class::rvt ).delay;
    auto const r = required[it->output] - delay;
    required[it->inputs[0]] = std::min( required[it->inputs[0]], r );
    if ( kind_info( it->kind ).arity == 2u )
      required[it->inputs[1]] = std::min( required[it->inputs[1]], r );
  }
  auto const eps = 1e-9 * std::max( 1.0, critical );
  for ( auto& g : gates )
  {
    auto const slack = required[g.output] - arrival[g.output];
    if ( slack <= ( 1.0 - policy.critical_fraction ) * critical + eps )
      g.vt = vt_class::lvt;
    else if ( slack > policy.relaxed_fraction * critical )
      g.vt = vt_class::hvt;
    else
      g.vt = vt_class::rvt;
  }
}

ppa_report ppa( netlist const& n, cell_library const& lib )
{
  ppa_report r;
  if ( n.gates().empty() )
    return r;
  auto const arrival = arrival_times( n, lib );
  for ( auto const& g : n.gates() )
  {
    auto const& cell = lib.cell( g.kind, g.vt );
    r.area += cell.area;
    r.static_power += cell.mean_leakage();
    r.delay = std::max( r.delay, arrival[g.output] );
  }
  return r;
}

feature_vector extract_features( netlist const& n, cell_library const& lib )
{
  feature_vector f;
  std::set<std::pair<cell_kind, vt_class>> types;
  double total = 0, lvt = 0, hvt = 0;
  for ( auto const& g : n.gates() )
  {
    types.emplace( g.kind, g.vt );
    auto const area = lib.cell( g.kind, g.vt ).area;
    total += area;
    if ( g.vt == vt_class::lvt )
      lvt += area;
    else if ( g.vt == vt_class::hvt )
      hvt += area;
  }
  f.f1_overall_diversity = double( types.size() );
  if ( total > 0 )
  {
    f.f2_lvt_area_pct = lvt / total;
    f.f3_hvt_area_pct = hvt / total;
  }
  return f;
}

} // namespace secsyn
