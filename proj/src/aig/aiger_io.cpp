#include <secsyn/aig.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace secsyn
{

namespace
{

class line_reader
{
public:
  explicit line_reader( std::string_view text ) : text_( text ) {}

  bool next( std::string_view& line )
  {
    if ( pos_ >= text_.size() )
      return false;
    auto end = text_.find( '\n', pos_ );
    if ( end == std::string_view::npos )
      end = text_.size();
    line = text_.substr( pos_, end - pos_ );
    if ( !line.empty() && line.back() == '\r' )
      line.remove_suffix( 1 );
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }

private:
  std::string_view text_;
  std::size_t pos_{ 0 };
  std::size_t line_no_{ 0 };
};

std::vector<uint64_t> parse_numbers( std::string_view line, std::size_t line_no )
{
  std::vector<uint64_t> values;
  std::size_t i = 0;
  while ( i < line.size() )
  {
    while ( i < line.size() && line[i] == ' ' )
      ++i;
    if ( i >= line.size() )
      break;
    uint64_t value = 0;
    auto const* first = line.data() + i;
    auto const* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars( first, last, value );
    if ( ec != std::errc{} || ( ptr != last && *ptr != ' ' ) )
    {
      throw aig_error( "line " + std::to_string( line_no ) + ": expected unsigned integers, got '" + std::string( line ) + "'" );
    }
    values.push_back( value );
    i = static_cast<std::size_t>( ptr - line.data() );
  }
  return values;
}

} // namespace

aig parse_aiger( std::string_view text )
{
  line_reader reader( text );
  std::string_view line;
  if ( !reader.next( line ) || line.substr( 0, 4 ) != "aag " )
  {
    throw aig_error( "malformed header: expected 'aag M I L O A'" );
  }
  auto const header = parse_numbers( line.substr( 4 ), 1 );
  if ( header.size() < 5 )
  {
    throw aig_error( "malformed header: expected 'aag M I L O A'" );
  }
  auto const max_var = header[0];
  auto const num_in = header[1];
  auto const num_latch = header[2];
  auto const num_out = header[3];
  auto const num_and = header[4];
  if ( num_latch != 0 )
  {
    throw aig_error( "sequential input unsupported: latch count must be 0" );
  }
  if ( max_var < num_in + num_and )
  {
    throw aig_error( "malformed header: M is smaller than I + L + A" );
  }

  auto expect_line = [&]( char const* what ) {
    if ( !reader.next( line ) )
    {
      throw aig_error( std::string( "unexpected end of document while reading " ) + what );
    }
    return parse_numbers( line, reader.line_no() );
  };

  std::vector<uint64_t> input_lits( num_in );
  for ( auto& l : input_lits )
  {
    auto v = expect_line( "inputs" );
    if ( v.size() != 1 || v[0] < 2 || ( v[0] & 1u ) || v[0] / 2 > max_var )
      throw aig_error( "line " + std::to_string( reader.line_no() ) + ": invalid input literal" );
    l = v[0];
  }
  std::vector<uint64_t> output_lits( num_out );
  for ( auto& l : output_lits )
  {
    auto v = expect_line( "outputs" );
    if ( v.size() != 1 )
      throw aig_error( "line " + std::to_string( reader.line_no() ) + ": invalid output line" );
    l = v[0];
  }
  struct raw_and
  {
    uint64_t rhs0, rhs1;
  };
  std::unordered_map<uint64_t, raw_and> definitions;
  for ( uint64_t i = 0; i < num_and; ++i )
  {
    auto v = expect_line( "AND gates" );
    if ( v.size() != 3 || ( v[0] & 1u ) || v[0] < 2 || v[0] / 2 > max_var )
      throw aig_error( "line " + std::to_string( reader.line_no() ) + ": invalid AND definition" );
    if ( !definitions.emplace( v[0] / 2, raw_and{ v[1], v[2] } ).second )
      throw aig_error( "line " + std::to_string( reader.line_no() ) + ": variable defined twice" );
  }

  aig g( static_cast<uint32_t>( num_in ) );
  std::unordered_map<uint64_t, literal> map;
  map.emplace( 0u, lit_false );
  for ( uint32_t i = 0; i < num_in; ++i )
  {
    if ( !map.emplace( input_lits[i] / 2, g.input( i ) ).second || definitions.count( input_lits[i] / 2 ) )
      throw aig_error( "input variable " + std::to_string( input_lits[i] / 2 ) + " defined twice" );
  }

  /* AND definitions may appear in any order; resolve them with an explicit DFS */
  enum class mark : uint8_t { none, active };
  std::unordered_map<uint64_t, mark> marks;
  auto resolve = [&]( uint64_t root_lit ) -> literal {
    std::vector<uint64_t> stack{ root_lit / 2 };
    while ( !stack.empty() )
    {
      auto const var = stack.back();
      if ( map.count( var ) )
      {
        stack.pop_back();
        continue;
      }
      auto def = definitions.find( var );
      if ( def == definitions.end() )
        throw aig_error( "dangling literal reference to variable " + std::to_string( var ) );
      bool ready = true;
      for ( auto rhs : { def->second.rhs0, def->second.rhs1 } )
      {
        if ( rhs / 2 > max_var )
          throw aig_error( "dangling literal reference to variable " + std::to_string( rhs / 2 ) );
        if ( !map.count( rhs / 2 ) )
        {
          if ( marks[rhs / 2] == mark::active )
            throw aig_error( "combinational cycle through variable " + std::to_string( rhs / 2 ) );
          ready = false;
          stack.push_back( rhs / 2 );
        }
      }
      if ( ready )
      {
        auto const a = lit_not_cond( map.at( def->second.rhs0 / 2 ), def->second.rhs0 & 1u );
        auto const b = lit_not_cond( map.at( def->second.rhs1 / 2 ), def->second.rhs1 & 1u );
        map.emplace( var, g.add_and( a, b ) );
        stack.pop_back();
      }
      else
      {
        marks[var] = mark::active;
      }
    }
    return lit_not_cond( map.at( root_lit / 2 ), root_lit & 1u );
  };

  /* keep every defined AND, dangling ones included */
  std::vector<uint64_t> defined_vars;
  defined_vars.reserve( definitions.size() );
  for ( auto const& [var, def] : definitions )
    defined_vars.push_back( var );
  std::sort( defined_vars.begin(), defined_vars.end() );
  for ( auto var : defined_vars )
    resolve( 2 * var );
  for ( auto l : output_lits )
  {
    if ( l / 2 > max_var )
      throw aig_error( "output literal " + std::to_string( l ) + " exceeds M" );
    g.add_output( resolve( l ) );
  }
  return g;
}

std::string serialize_aiger( aig const& g )
{
  std::ostringstream os;
  os << "aag " << ( g.num_vars() - 1u ) << ' ' << g.num_inputs() << " 0 " << g.num_outputs() << ' ' << g.num_ands();
  for ( uint32_t i = 0; i < g.num_inputs(); ++i )
  {
    os << '\n' << g.input( i );
  }
  for ( auto o : g.outputs() )
  {
    os << '\n' << o;
  }
  for ( auto var = g.num_inputs() + 1u; var < g.num_vars(); ++var )
  {
    auto const& n = g.node( var );
    os << '\n' << make_lit( var ) << ' ' << n.fanin1 << ' ' << n.fanin0;
  }
  return os.str();
}

aig read_aiger_file( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
  {
    throw aig_error( "cannot open '" + path + "'" );
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_aiger( buffer.str() );
}

void write_aiger_file( aig const& g, std::string const& path )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
  {
    throw aig_error( "cannot write '" + path + "'" );
  }
  out << serialize_aiger( g ) << '\n';
}

} // namespace secsyn
