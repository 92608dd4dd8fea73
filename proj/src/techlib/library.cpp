#include <secsyn/seeding.hpp>
#include <secsyn/techlib.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace secsyn
{

namespace
{

constexpr std::array<cell_kind_info, num_cell_kinds> kinds{ {
    { "INV", 1, 0b01, 1.0, 1.0, 1.0 },
    { "AND2", 2, 0b1000, 2.0, 1.6, 2.2 },
    { "NAND2", 2, 0b0111, 1.5, 1.0, 1.4 },
    { "OR2", 2, 0b1110, 2.0, 1.7, 2.3 },
    { "NOR2", 2, 0b0001, 1.5, 1.2, 1.5 },
    { "XOR2", 2, 0b0110, 3.0, 2.0, 3.0 } } };

constexpr std::array<char const*, num_vt_classes> vt_names{ "LVT", "RVT", "HVT" };

} // namespace

cell_kind_info const& kind_info( cell_kind k )
{
  return kinds.at( static_cast<std::size_t>( k ) );
}

char const* vt_name( vt_class v )
{
  return vt_names.at( static_cast<std::size_t>( v ) );
}

cell_kind parse_cell_kind( std::string const& name )
{
  for ( uint32_t i = 0; i < num_cell_kinds; ++i )
  {
    if ( name == kinds[i].name )
      return cell_kind( i );
  }
  throw techlib_error( "unknown cell kind '" + name + "'" );
}

vt_class parse_vt_class( std::string const& name )
{
  for ( uint32_t i = 0; i < num_vt_classes; ++i )
  {
    if ( name == vt_names[i] )
      return vt_class( i );
  }
  throw techlib_error( "unknown VT class '" + name + "'" );
}

double library_cell::mean_leakage() const
{
  double sum = 0;
  for ( auto l : leakage )
    sum += l;
  return leakage.empty() ? 0.0 : sum / double( leakage.size() );
}

cell_library::cell_library( library_params params, std::vector<library_cell> cells ) : params_( params ), cells_( std::move( cells ) )
{
  if ( cells_.size() != num_cell_kinds * num_vt_classes )
    throw techlib_error( "library must contain every cell kind in every VT class" );
  std::sort( cells_.begin(), cells_.end(), []( library_cell const& a, library_cell const& b ) {
    return std::pair( a.kind, a.vt ) < std::pair( b.kind, b.vt );
  } );
  for ( uint32_t i = 0; i < cells_.size(); ++i )
  {
    auto const& c = cells_[i];
    if ( uint32_t( c.kind ) * num_vt_classes + uint32_t( c.vt ) != i )
      throw techlib_error( "library contains duplicate cells" );
    if ( c.leakage.size() != ( 1u << kind_info( c.kind ).arity ) )
      throw techlib_error( std::string( "leakage table of " ) + kind_info( c.kind ).name + " has the wrong size" );
    if ( !( c.area > 0 ) || !( c.delay > 0 ) || std::any_of( c.leakage.begin(), c.leakage.end(), []( double l ) { return !( l > 0 ); } ) )
      throw techlib_error( std::string( "non-positive value in cell " ) + kind_info( c.kind ).name );
  }
}

library_cell const& cell_library::cell( cell_kind k, vt_class v ) const
{
  if ( cells_.empty() )
    throw techlib_error( "empty library" );
  return cells_[uint32_t( k ) * num_vt_classes + uint32_t( v )];
}

double cell_library::instance_leakage( cell_kind k, vt_class v, uint32_t instance, uint32_t state ) const
{
  auto const nominal = cell( k, v ).leakage[state];
  if ( params_.instance_variation == 0.0 )
    return nominal;
  auto const u = 2.0 * unit_interval( derive_seed( params_.seed, { 0x1e4ull, instance, state } ) ) - 1.0;
  return nominal * ( 1.0 + params_.instance_variation * u );
}

cell_library generate_library( library_params const& params )
{
  for ( uint32_t v = 0; v < num_vt_classes; ++v )
  {
    if ( !( params.leakage_scale[v] > 0 ) || !( params.delay_scale[v] > 0 ) )
      throw techlib_error( "VT scales must be positive" );
  }
  if ( params.alpha < 0 || params.jitter < 0 || params.jitter >= 1 || params.instance_variation < 0 || params.instance_variation >= 1 )
    throw techlib_error( "library parameters out of range" );

  std::mt19937_64 rng( params.seed );
  std::uniform_real_distribution<double> jitter( -params.jitter, params.jitter );
  std::vector<library_cell> cells;
  for ( uint32_t k = 0; k < num_cell_kinds; ++k )
  {
    auto const& info = kinds[k];
    std::vector<double> shape( 1u << info.arity );
    for ( uint32_t s = 0; s < shape.size(); ++s )
    {
      auto const j = params.jitter > 0 ? jitter( rng ) : 0.0;
      shape[s] = info.base_leakage * ( 1.0 + params.alpha * std::popcount( s ) ) * ( 1.0 + j );
    }
    for ( uint32_t v = 0; v < num_vt_classes; ++v )
    {
      library_cell c{ cell_kind( k ), vt_class( v ), info.area, info.delay * params.delay_scale[v], {} };
      for ( auto s : shape )
        c.leakage.push_back( s * params.leakage_scale[v] );
      cells.push_back( std::move( c ) );
    }
  }
  return cell_library( params, std::move( cells ) );
}

std::string library_to_json( cell_library const& lib )
{
  auto const& p = lib.params();
  nlohmann::ordered_json doc;
  doc["format"] = "secsyn-library";
  doc["version"] = 1;
  doc["params"] = { { "seed", p.seed },
                    { "leakage_scale", p.leakage_scale },
                    { "delay_scale", p.delay_scale },
                    { "alpha", p.alpha },
                    { "jitter", p.jitter },
                    { "instance_variation", p.instance_variation } };
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for ( auto const& c : lib.cells() )
  {
    cells.push_back( { { "kind", kind_info( c.kind ).name },
                       { "vt", vt_name( c.vt ) },
                       { "area", c.area },
                       { "delay", c.delay },
                       { "leakage", c.leakage } } );
  }
  return doc.dump( 2 );
}

cell_library library_from_json( std::string const& text )
{
  try
  {
    auto const doc = nlohmann::json::parse( text );
    if ( doc.at( "format" ) != "secsyn-library" || doc.at( "version" ) != 1 )
      throw techlib_error( "unsupported library document" );
    auto const& jp = doc.at( "params" );
    library_params p;
    p.seed = jp.at( "seed" ).get<uint64_t>();
    p.leakage_scale = jp.at( "leakage_scale" ).get<std::array<double, num_vt_classes>>();
    p.delay_scale = jp.at( "delay_scale" ).get<std::array<double, num_vt_classes>>();
    p.alpha = jp.at( "alpha" ).get<double>();
    p.jitter = jp.at( "jitter" ).get<double>();
    p.instance_variation = jp.at( "instance_variation" ).get<double>();
    std::vector<library_cell> cells;
    for ( auto const& jc : doc.at( "cells" ) )
    {
      cells.push_back( { parse_cell_kind( jc.at( "kind" ).get<std::string>() ), parse_vt_class( jc.at( "vt" ).get<std::string>() ),
                         jc.at( "area" ).get<double>(), jc.at( "delay" ).get<double>(), jc.at( "leakage" ).get<std::vector<double>>() } );
    }
    return cell_library( p, std::move( cells ) );
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw techlib_error( std::string( "malformed library document: " ) + e.what() );
  }
}

} // namespace secsyn
