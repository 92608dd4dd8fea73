#include <secsyn/techlib.hpp>

#include <optional>

namespace secsyn
{

namespace
{

class mapper
{
public:
  mapper( aig const& g ) : g_( g ), result_( g.num_inputs() ), net_( g.num_vars(), net_const0 ), positive_( g.num_vars(), 1u ), inverter_( g.num_vars(), no_net ),
                           needed_( g.num_vars(), 0u ), xor_( g.num_vars() )
  {
    for ( uint32_t i = 0; i < g.num_inputs(); ++i )
      net_[i + 1u] = result_.input_net( i );
  }

  netlist run()
  {
    find_cover();
    choose_polarities();
    for ( auto var = g_.num_inputs() + 1u; var < g_.num_vars(); ++var )
    {
      if ( needed_[var] )
        build( var );
    }
    for ( auto o : g_.outputs() )
      result_.add_output( net_for( o ) );
    return std::move( result_ );
  }

private:
  static constexpr uint32_t no_net = ~0u;

  struct xor_match
  {
    literal a, b; /* node == a XOR b */
  };

  /* node = !(x & y) & !(!x & !y) with both inner ANDs single-fanout */
  std::optional<xor_match> match_xor( uint32_t var, std::vector<uint32_t> const& refs ) const
  {
    auto const& n = g_.node( var );
    if ( !lit_is_complemented( n.fanin0 ) || !lit_is_complemented( n.fanin1 ) )
      return std::nullopt;
    auto const p = lit_var( n.fanin0 ), q = lit_var( n.fanin1 );
    if ( !g_.is_and( p ) || !g_.is_and( q ) || refs[p] != 1u || refs[q] != 1u )
      return std::nullopt;
    auto const& np = g_.node( p );
    auto const& nq = g_.node( q );
    if ( ( np.fanin0 == lit_not( nq.fanin0 ) && np.fanin1 == lit_not( nq.fanin1 ) ) ||
         ( np.fanin0 == lit_not( nq.fanin1 ) && np.fanin1 == lit_not( nq.fanin0 ) ) )
      return xor_match{ np.fanin0, np.fanin1 };
    return std::nullopt;
  }

  void find_cover()
  {
    auto const refs = g_.fanout_counts();
    for ( auto o : g_.outputs() )
      needed_[lit_var( o )] = 1u;
    for ( auto var = g_.num_vars(); var-- > g_.num_inputs() + 1u; )
    {
      if ( !needed_[var] )
        continue;
      if ( ( xor_[var] = match_xor( var, refs ) ) )
      {
        needed_[lit_var( xor_[var]->a )] = 1u;
        needed_[lit_var( xor_[var]->b )] = 1u;
      }
      else
      {
        needed_[lit_var( g_.node( var ).fanin0 )] = 1u;
        needed_[lit_var( g_.node( var ).fanin1 )] = 1u;
      }
    }
  }

  /* majority of complemented versus plain uses decides each node's net polarity */
  void choose_polarities()
  {
    std::vector<int> balance( g_.num_vars(), 0 );
    auto use = [&]( literal l ) { balance[lit_var( l )] += lit_is_complemented( l ) ? -1 : 1; };
    for ( auto var = g_.num_inputs() + 1u; var < g_.num_vars(); ++var )
    {
      if ( !needed_[var] || xor_[var] )
        continue;
      use( g_.node( var ).fanin0 );
      use( g_.node( var ).fanin1 );
    }
    for ( auto o : g_.outputs() )
      use( o );
    for ( auto var = g_.num_inputs() + 1u; var < g_.num_vars(); ++var )
      positive_[var] = balance[var] >= 0 ? 1u : 0u;
  }

  /* true if the node's own net carries literal `l` */
  bool direct( literal l ) const
  {
    auto const v = lit_var( l );
    if ( v == 0u )
      return true;
    return bool( positive_[v] ) != lit_is_complemented( l );
  }

  uint32_t inverter_of( uint32_t var, vt_class vt = vt_class::rvt )
  {
    if ( inverter_[var] == no_net )
      inverter_[var] = result_.add_gate( cell_kind::inv, vt, net_[var] );
    return inverter_[var];
  }

  uint32_t net_for( literal l )
  {
    auto const v = lit_var( l );
    if ( v == 0u )
      return lit_is_complemented( l ) ? net_const1 : net_const0;
    return direct( l ) ? net_[v] : inverter_of( v );
  }

  void build( uint32_t var )
  {
    if ( xor_[var] )
    {
      auto const [a, b] = *xor_[var];
      auto const na = net_[lit_var( a )], nb = net_[lit_var( b )];
      net_[var] = result_.add_gate( cell_kind::xor2, vt_class::rvt, na, nb );
      /* the net carries a^b flipped once for every operand whose net is inverted */
      positive_[var] = ( direct( a ) == direct( b ) ) ? 1u : 0u;
      return;
    }
    auto const& n = g_.node( var );
    auto const l0 = n.fanin0, l1 = n.fanin1;
    bool d0 = direct( l0 ), d1 = direct( l1 );
    uint32_t n0, n1;
    if ( d0 == d1 )
    {
      n0 = net_[lit_var( l0 )];
      n1 = net_[lit_var( l1 )];
      if ( lit_var( l0 ) == 0u )
        n0 = net_for( d0 ? l0 : lit_not( l0 ) );
      if ( lit_var( l1 ) == 0u )
        n1 = net_for( d1 ? l1 : lit_not( l1 ) );
    }
    else
    {
      /* mixed polarity: reuse an existing inverter if possible */
      auto const inv_var = d0 ? lit_var( l1 ) : lit_var( l0 );
      auto const dir_var = d0 ? lit_var( l0 ) : lit_var( l1 );
      if ( inverter_[inv_var] == no_net && inverter_[dir_var] != no_net )
      {
        /* feed both inverted */
        n0 = d0 ? inverter_[dir_var] : net_[inv_var];
        n1 = d0 ? net_[inv_var] : inverter_[dir_var];
        d0 = d1 = false;
      }
      else
      {
        n0 = d0 ? net_[dir_var] : inverter_of( inv_var );
        n1 = d0 ? inverter_of( inv_var ) : net_[dir_var];
        d0 = d1 = true;
      }
    }
    bool const pos = positive_[var];
    cell_kind kind;
    if ( d0 )
      kind = pos ? cell_kind::and2 : cell_kind::nand2;
    else
      kind = pos ? cell_kind::nor2 : cell_kind::or2;
    net_[var] = result_.add_gate( kind, vt_class::rvt, n0, n1 );
  }

  aig const& g_;
  netlist result_;
  std::vector<uint32_t> net_;
  std::vector<uint8_t> positive_;
  std::vector<uint32_t> inverter_;
  std::vector<uint8_t> needed_;
  std::vector<std::optional<xor_match>> xor_;
};

} // namespace

netlist map_aig( aig const& g, cell_library const& lib, vt_policy const& policy )
{
  if ( lib.empty() )
    throw techlib_error( "cannot map onto an empty library" );
  auto n = mapper( g ).run();
  assign_vt( n, lib, policy );
  return n;
}

} // namespace secsyn
