#include <secsyn/countermeasures.hpp>

namespace secsyn
{

namespace
{

cell_kind dual_kind( cell_kind k )
{
  switch ( k )
  {
  case cell_kind::and2:
    return cell_kind::or2;
  case cell_kind::or2:
    return cell_kind::and2;
  case cell_kind::nand2:
    return cell_kind::nor2;
  case cell_kind::nor2:
    return cell_kind::nand2;
  default:
    return k;
  }
}

} // namespace

netlist apply_elb( netlist const& n, cell_library const& lib )
{
  if ( lib.empty() )
    throw techlib_error( "empty library" );
  netlist out( n.num_inputs() );
  std::vector<uint32_t> map( n.num_nets(), 0u );
  map[net_const1] = net_const1;
  for ( uint32_t i = 0; i < n.num_inputs(); ++i )
    map[n.input_net( i )] = out.input_net( i );

  struct complement_source
  {
    uint32_t net{ 0 };
    uint32_t pins{ elb_complement_fanout };
  };
  std::vector<complement_source> comp( out.num_nets() );
  std::vector<vt_class> driver_vt( out.num_nets(), vt_class::rvt );
  auto grow = [&]() {
    comp.resize( out.num_nets() );
    driver_vt.resize( out.num_nets(), vt_class::rvt );
  };
  /* one companion input pin fed with the complement of `net` */
  auto complement = [&]( uint32_t net ) {
    if ( net == net_const0 || net == net_const1 )
      return net ^ 1u;
    if ( comp[net].pins == elb_complement_fanout )
    {
      auto const inv = out.add_gate( cell_kind::inv, driver_vt[net], net );
      grow();
      comp[net] = { inv, 0u };
    }
    ++comp[net].pins;
    return comp[net].net;
  };

  for ( auto const& g : n.gates() )
  {
    auto const arity = kind_info( g.kind ).arity;
    if ( arity > 2u )
      throw techlib_error( "ELB supports cells with at most 2 inputs" );
    auto const a = map[g.inputs[0]];
    auto const b = arity == 2u ? map[g.inputs[1]] : 0u;
    auto const o = out.add_gate( g.kind, g.vt, a, b );
    grow();
    driver_vt[o] = g.vt;
    map[g.output] = o;
    if ( arity == 1u )
    {
      out.add_gate( g.kind, g.vt, complement( a ) );
    }
    else
    {
      auto const na = complement( a );
      out.add_gate( g.kind, g.vt, na, b );
      auto const nb = complement( b );
      out.add_gate( g.kind, g.vt, a, nb );
      out.add_gate( g.kind, g.vt, complement( a ), complement( b ) );
    }
    grow();
  }
  for ( auto o : n.outputs() )
    out.add_output( map[o] );
  return out;
}

crypto_design apply_elb( crypto_design const& d, cell_library const& lib )
{
  if ( d.countermeasure != countermeasure_kind::none )
    throw design_error( "ELB expects an unprotected design" );
  crypto_design p;
  p.key = d.key;
  p.countermeasure = countermeasure_kind::elb;
  p.instances = d.instances;

  /* expose the observed nets as outputs so that they survive the rebuild */
  netlist src = d.circuit;
  auto const base_outputs = src.outputs().size();
  for ( auto const& ph : d.phases )
  {
    for ( auto net : ph.output_net )
      src.add_output( net );
  }
  auto prot = apply_elb( src, lib );
  std::size_t next = base_outputs;
  for ( auto ph : d.phases )
  {
    for ( auto& net : ph.output_net )
      net = prot.outputs()[next++];
    p.phases.push_back( ph );
  }
  prot.outputs().resize( base_outputs );
  p.circuit = std::move( prot );
  return p;
}

netlist dual_netlist( netlist const& n )
{
  netlist out( n.num_inputs() );
  std::vector<uint32_t> map( n.num_nets(), 0u );
  map[net_const0] = net_const1;
  map[net_const1] = net_const0;
  for ( uint32_t i = 0; i < n.num_inputs(); ++i )
    map[n.input_net( i )] = out.input_net( i );
  for ( auto const& g : n.gates() )
  {
    auto const k = dual_kind( g.kind );
    if ( kind_info( g.kind ).arity == 1u )
    {
      map[g.output] = out.add_gate( k, g.vt, map[g.inputs[0]] );
      continue;
    }
    auto o = out.add_gate( k, g.vt, map[g.inputs[0]], map[g.inputs[1]] );
    if ( g.kind == cell_kind::xor2 )
      o = out.add_gate( cell_kind::inv, g.vt, o );
    map[g.output] = o;
  }
  for ( auto o : n.outputs() )
    out.add_output( map[o] );
  return out;
}

std::array<quadseal_phase, 4> const& quadseal_schedule()
{
  static std::array<quadseal_phase, 4> const s{ {
      { { 0, 1, 1, 0 }, 0u, false },
      { { 1, 1, 0, 0 }, 1u, true },
      { { 1, 0, 0, 1 }, 2u, false },
      { { 0, 0, 1, 1 }, 3u, true } } };
  return s;
}

crypto_design apply_quadseal( crypto_design const& d, cell_library const& lib, uint32_t schedule_length )
{
  if ( lib.empty() )
    throw techlib_error( "empty library" );
  if ( d.countermeasure != countermeasure_kind::none || d.phases.size() != 1u || d.instances != 1u )
    throw design_error( "QuadSeal expects an unprotected single-instance design" );
  if ( schedule_length == 0u || schedule_length > 4u )
    throw design_error( "QuadSeal schedule length must be in 1..4" );
  auto const& src = d.circuit;
  auto const inputs = src.num_inputs();
  auto const& base = d.phases.front();

  /* instance netlists expose the observed nets as outputs */
  netlist primal = src;
  primal.outputs().clear();
  for ( auto net : base.output_net )
    primal.add_output( net );
  auto const dual = dual_netlist( primal );

  netlist out( 4u * inputs );
  std::array<std::array<uint32_t, 8>, 4> observed{};
  for ( uint32_t inst = 0; inst < 4u; ++inst )
  {
    auto const& part = ( inst % 2u == 0u ) ? primal : dual;
    std::vector<uint32_t> map( part.num_nets(), 0u );
    map[net_const1] = net_const1;
    for ( uint32_t i = 0; i < inputs; ++i )
      map[part.input_net( i )] = out.input_net( inst * inputs + i );
    for ( auto const& g : part.gates() )
      map[g.output] = out.add_gate( g.kind, g.vt, map[g.inputs[0]], map[g.inputs[1]] );
    for ( uint32_t b = 0; b < 8u; ++b )
      observed[inst][b] = map[part.outputs()[b]];
  }
  for ( auto const& inst : observed )
  {
    for ( auto net : inst )
      out.add_output( net );
  }

  crypto_design p;
  p.key = d.key;
  p.countermeasure = countermeasure_kind::quadseal;
  p.instances = 4;
  p.circuit = std::move( out );
  for ( uint32_t ph = 0; ph < schedule_length; ++ph )
  {
    auto const& q = quadseal_schedule()[ph];
    design_phase dp;
    for ( uint32_t inst = 0; inst < 4u; ++inst )
    {
      for ( uint32_t i = 0; i < inputs; ++i )
      {
        dp.input_bit.push_back( base.input_bit[i] );
        dp.input_invert.push_back( uint8_t( base.input_invert[i] ^ q.input_invert[inst] ) );
      }
    }
    for ( uint32_t b = 0; b < 8u; ++b )
    {
      dp.output_net[b] = observed[q.read_instance][b];
      dp.output_invert[b] = uint8_t( base.output_invert[b] ^ ( q.read_invert ? 1u : 0u ) );
    }
    p.phases.push_back( std::move( dp ) );
  }
  return p;
}

crypto_design apply_countermeasure( crypto_design const& d, cell_library const& lib, countermeasure_kind k )
{
  switch ( k )
  {
  case countermeasure_kind::none:
    return d;
  case countermeasure_kind::elb:
    return apply_elb( d, lib );
  case countermeasure_kind::quadseal:
    return apply_quadseal( d, lib );
  }
  throw design_error( "unknown countermeasure" );
}

equivalence_result verify_countermeasure( netlist const& original, netlist const& protected_netlist )
{
  if ( original.num_inputs() != protected_netlist.num_inputs() || original.outputs().size() != protected_netlist.outputs().size() )
    throw techlib_error( "verify_countermeasure: arity mismatch" );
  return equivalent( to_aig( original ), to_aig( protected_netlist ), equivalence_mode::exhaustive() );
}

design_check verify_countermeasure( crypto_design const& original, crypto_design const& protected_design )
{
  for ( uint32_t ph = 0; ph < protected_design.phases.size(); ++ph )
  {
    for ( uint32_t pt = 0; pt < 256u; ++pt )
    {
      if ( evaluate( original, uint8_t( pt ) ) != evaluate( protected_design, uint8_t( pt ), ph ) )
        return { false, ph, uint8_t( pt ) };
    }
  }
  return {};
}

} // namespace secsyn
