#include <secsyn/transforms.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace secsyn
{

namespace
{

std::vector<action_info> make_actions()
{
  std::vector<action_info> actions{
      { 0, "balance", "b" },
      { 1, "rewrite", "rw" },
      { 2, "rewrite -z", "rwz" },
      { 3, "refactor", "rf" },
      { 4, "refactor -z", "rfz" } };
  for ( uint32_t k : { 6u, 8u, 10u, 12u } )
  {
    auto const id = action_id( actions.size() );
    actions.push_back( { id, "resub K=" + std::to_string( k ), "rs" + std::to_string( k ) } );
    actions.push_back( { id + 1u, "resub K=" + std::to_string( k ) + " -z", "rs" + std::to_string( k ) + "z" } );
  }
  return actions;
}

std::string normalize( std::string_view token )
{
  std::string out;
  bool space = false;
  for ( char c : token )
  {
    if ( std::isspace( static_cast<unsigned char>( c ) ) )
    {
      space = !out.empty();
      continue;
    }
    if ( space )
      out.push_back( ' ' );
    space = false;
    out.push_back( char( std::tolower( static_cast<unsigned char>( c ) ) ) );
  }
  return out;
}

} // namespace

std::vector<action_info> const& action_set()
{
  static auto const actions = make_actions();
  return actions;
}

uint32_t num_actions()
{
  return uint32_t( action_set().size() );
}

aig apply_action( aig const& g, action_id a, uint64_t seed )
{
  switch ( a )
  {
  case 0:
    return balance( g, seed );
  case 1:
  case 2:
    return rewrite( g, a == 2 );
  case 3:
  case 4:
    return refactor( g, a == 4 );
  default:
    break;
  }
  if ( a < num_actions() )
  {
    auto const index = a - 5u;
    return resubstitute( g, 6u + 2u * ( index / 2u ), index % 2u == 1u );
  }
  throw recipe_error( "unknown action id " + std::to_string( a ) );
}

aig apply_recipe( aig const& g, recipe const& r, uint64_t seed )
{
  auto current = g;
  for ( auto a : r )
    current = apply_action( current, a, seed );
  return current;
}

recipe parse_recipe( std::string_view text )
{
  recipe r;
  std::size_t start = 0;
  while ( start <= text.size() )
  {
    auto end = text.find( ';', start );
    if ( end == std::string_view::npos )
      end = text.size();
    auto const token = normalize( text.substr( start, end - start ) );
    start = end + 1;
    if ( token.empty() )
      continue;
    auto const& actions = action_set();
    auto it = std::find_if( actions.begin(), actions.end(), [&]( action_info const& info ) {
      return token == info.name || token == info.short_name || token == normalize( info.name );
    } );
    if ( it == actions.end() )
      throw recipe_error( "unknown recipe step '" + token + "'" );
    r.push_back( it->id );
  }
  return r;
}

std::string format_recipe( recipe const& r )
{
  std::ostringstream os;
  for ( std::size_t i = 0; i < r.size(); ++i )
  {
    if ( i )
      os << "; ";
    os << action_set().at( r[i] ).name;
  }
  return os.str();
}

void validate_recipe( recipe const& r, uint32_t horizon )
{
  if ( r.size() > horizon )
    throw recipe_error( "recipe length " + std::to_string( r.size() ) + " exceeds horizon " + std::to_string( horizon ) );
  for ( auto a : r )
  {
    if ( a >= num_actions() )
      throw recipe_error( "unknown action id " + std::to_string( a ) );
  }
}

recipe compress2rs_like_recipe()
{
  return parse_recipe( "b; rs6; rw; rs6z; rf; rs8; b; rs8z; rw; rs10; rwz; rs10z; b; rs12; rfz; rs12z; rwz; b" );
}

} // namespace secsyn
