#include <secsyn/techlib.hpp>

#include <sstream>

namespace secsyn
{

uint32_t netlist::add_gate( cell_kind k, vt_class v, uint32_t a, uint32_t b )
{
  auto const arity = kind_info( k ).arity;
  if ( a >= num_nets_ || ( arity == 2u && b >= num_nets_ ) )
    throw techlib_error( "gate input references a missing net" );
  gates_.push_back( { k, v, { a, arity == 2u ? b : 0u }, num_nets_ } );
  return num_nets_++;
}

void netlist::add_output( uint32_t net )
{
  if ( net >= num_nets_ )
    throw techlib_error( "output references a missing net" );
  outputs_.push_back( net );
}

std::vector<int32_t> netlist::drivers() const
{
  std::vector<int32_t> d( num_nets_, -1 );
  for ( uint32_t i = 0; i < gates_.size(); ++i )
    d[gates_[i].output] = int32_t( i );
  return d;
}

std::vector<uint64_t> simulate_nets( netlist const& n, std::span<uint64_t const> input_words, std::size_t words )
{
  if ( input_words.size() != std::size_t( n.num_inputs() ) * words )
    throw techlib_error( "simulate_nets: wrong number of input words" );
  std::vector<uint64_t> values( std::size_t( n.num_nets() ) * words, 0u );
  std::fill_n( values.begin() + std::ptrdiff_t( words ), words, ~uint64_t( 0 ) );
  std::copy( input_words.begin(), input_words.end(), values.begin() + std::ptrdiff_t( 2u * words ) );
  for ( auto const& g : n.gates() )
  {
    auto const* a = values.data() + std::size_t( g.inputs[0] ) * words;
    auto const* b = values.data() + std::size_t( g.inputs[1] ) * words;
    auto* out = values.data() + std::size_t( g.output ) * words;
    for ( std::size_t w = 0; w < words; ++w )
    {
      switch ( g.kind )
      {
      case cell_kind::inv:
        out[w] = ~a[w];
        break;
      case cell_kind::and2:
        out[w] = a[w] & b[w];
        break;
      case cell_kind::nand2:
        out[w] = ~( a[w] & b[w] );
        break;
      case cell_kind::or2:
        out[w] = a[w] | b[w];
        break;
      case cell_kind::nor2:
        out[w] = ~( a[w] | b[w] );
        break;
      case cell_kind::xor2:
        out[w] = a[w] ^ b[w];
        break;
      }
    }
  }
  return values;
}

std::vector<bool> simulate( netlist const& n, std::vector<bool> const& inputs )
{
  if ( inputs.size() != n.num_inputs() )
    throw techlib_error( "simulate: expected " + std::to_string( n.num_inputs() ) + " inputs" );
  std::vector<uint64_t> words( inputs.size() );
  for ( std::size_t i = 0; i < inputs.size(); ++i )
    words[i] = inputs[i] ? 1u : 0u;
  auto const values = simulate_nets( n, words, 1 );
  std::vector<bool> out;
  for ( auto o : n.outputs() )
    out.push_back( ( values[o] & 1u ) != 0u );
  return out;
}

aig to_aig( netlist const& n )
{
  aig g( n.num_inputs() );
  std::vector<literal> map( n.num_nets(), lit_false );
  map[net_const1] = lit_true;
  for ( uint32_t i = 0; i < n.num_inputs(); ++i )
    map[n.input_net( i )] = g.input( i );
  for ( auto const& gt : n.gates() )
  {
    auto const a = map[gt.inputs[0]];
    auto const b = map[gt.inputs[1]];
    literal r = lit_false;
    switch ( gt.kind )
    {
    case cell_kind::inv:
      r = lit_not( a );
      break;
    case cell_kind::and2:
      r = g.add_and( a, b );
      break;
    case cell_kind::nand2:
      r = lit_not( g.add_and( a, b ) );
      break;
    case cell_kind::or2:
      r = g.add_or( a, b );
      break;
    case cell_kind::nor2:
      r = g.add_and( lit_not( a ), lit_not( b ) );
      break;
    case cell_kind::xor2:
      r = g.add_xor( a, b );
      break;
    }
    map[gt.output] = r;
  }
  for ( auto o : n.outputs() )
    g.add_output( map[o] );
  return g;
}

std::string dump_netlist( netlist const& n )
{
  std::ostringstream os;
  os << "netlist inputs " << n.num_inputs() << " nets " << n.num_nets() << " gates " << n.gates().size() << '\n';
  for ( uint32_t i = 0; i < n.gates().size(); ++i )
  {
    auto const& g = n.gates()[i];
    os << 'g' << i << ' ' << kind_info( g.kind ).name << '_' << vt_name( g.vt ) << ' ' << g.inputs[0];
    if ( kind_info( g.kind ).arity == 2u )
      os << ' ' << g.inputs[1];
    os << " -> " << g.output << '\n';
  }
  os << "outputs";
  for ( auto o : n.outputs() )
    os << ' ' << o;
  os << '\n';
  return os.str();
}

} // namespace secsyn
