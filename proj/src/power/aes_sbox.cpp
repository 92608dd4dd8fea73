#include <secsyn/aes.hpp>

#include "../transforms/detail.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace secsyn
{

namespace
{

uint8_t gf16_mul( uint8_t a, uint8_t b )
{
  uint8_t r = 0;
  for ( int i = 0; i < 4; ++i )
  {
    if ( ( b >> i ) & 1u )
      r ^= uint8_t( a << i );
  }
  for ( int i = 7; i >= 4; --i )
  {
    if ( ( r >> i ) & 1u )
      r ^= uint8_t( 0x13u << ( i - 4 ) );
  }
  return r & 0xfu;
}

uint8_t gf16_inverse( uint8_t a )
{
  for ( uint8_t b = 1; b < 16; ++b )
  {
    if ( gf16_mul( a, b ) == 1u )
      return b;
  }
  return 0;
}

/* composite field GF((2^4)^2) with y^2 = y + lambda; element = (high << 4) | low */
struct composite_field
{
  uint8_t lambda;

  uint8_t mul( uint8_t a, uint8_t b ) const
  {
    uint8_t const ah = a >> 4, al = a & 0xfu, bh = b >> 4, bl = b & 0xfu;
    uint8_t const hh = gf16_mul( ah, bh );
    uint8_t const high = hh ^ gf16_mul( ah, bl ) ^ gf16_mul( al, bh );
    uint8_t const low = gf16_mul( hh, lambda ) ^ gf16_mul( al, bl );
    return uint8_t( ( high << 4 ) | low );
  }

  uint8_t power( uint8_t a, int e ) const
  {
    uint8_t r = 1;
    for ( int i = 0; i < e; ++i )
      r = mul( r, a );
    return r;
  }
};

using bit_matrix = std::array<uint8_t, 8>; /* row i: mask of input bits feeding output bit i */

bit_matrix from_columns( std::array<uint8_t, 8> const& columns )
{
  bit_matrix m{};
  for ( int col = 0; col < 8; ++col )
  {
    for ( int row = 0; row < 8; ++row )
    {
      if ( ( columns[col] >> row ) & 1u )
        m[row] |= uint8_t( 1u << col );
    }
  }
  return m;
}

uint8_t apply( bit_matrix const& m, uint8_t x )
{
  uint8_t r = 0;
  for ( int row = 0; row < 8; ++row )
  {
    if ( __builtin_parity( m[row] & x ) )
      r |= uint8_t( 1u << row );
  }
  return r;
}

std::optional<bit_matrix> invert( bit_matrix m )
{
  bit_matrix inv{};
  for ( int i = 0; i < 8; ++i )
    inv[i] = uint8_t( 1u << i );
  for ( int col = 0; col < 8; ++col )
  {
    int pivot = -1;
    for ( int row = col; row < 8; ++row )
    {
      if ( ( m[row] >> col ) & 1u )
      {
        pivot = row;
        break;
      }
    }
    if ( pivot < 0 )
      return std::nullopt;
    std::swap( m[col], m[pivot] );
    std::swap( inv[col], inv[pivot] );
    for ( int row = 0; row < 8; ++row )
    {
      if ( row != col && ( ( m[row] >> col ) & 1u ) )
      {
        m[row] ^= m[col];
        inv[row] ^= inv[col];
      }
    }
  }
  return inv;
}

bit_matrix multiply( bit_matrix const& a, bit_matrix const& b )
{
  /* (a * b) x = a (b x) */
  std::array<uint8_t, 8> columns{};
  for ( int col = 0; col < 8; ++col )
    columns[col] = apply( a, apply( b, uint8_t( 1u << col ) ) );
  return from_columns( columns );
}

struct tower
{
  composite_field field;
  bit_matrix to_composite;
  bit_matrix from_composite;
};

tower const& tower_basis()
{
  static tower const t = []() {
    for ( uint8_t lambda = 1; lambda < 16; ++lambda )
    {
      bool irreducible = true;
      for ( uint8_t t = 0; t < 16; ++t )
      {
        if ( ( gf16_mul( t, t ) ^ t ^ lambda ) == 0u )
          irreducible = false;
      }
      if ( !irreducible )
        continue;
      composite_field f{ lambda };
      /* beta must satisfy the AES polynomial x^8 + x^4 + x^3 + x + 1 */
      for ( int beta = 2; beta < 256; ++beta )
      {
        auto const b = uint8_t( beta );
        if ( ( f.power( b, 8 ) ^ f.power( b, 4 ) ^ f.power( b, 3 ) ^ b ^ 1u ) != 0u )
          continue;
        std::array<uint8_t, 8> columns{};
        for ( int i = 0; i < 8; ++i )
          columns[i] = f.power( b, i );
        auto const m = from_columns( columns );
        auto const inv = invert( m );
        if ( !inv )
          continue;
        return tower{ f, m, *inv };
      }
    }
    throw std::logic_error( "no composite-field basis found" );
  }();
  return t;
}

constexpr uint8_t affine_constant = 0x63u;

bit_matrix affine_matrix()
{
  bit_matrix m{};
  for ( int row = 0; row < 8; ++row )
  {
    for ( int k : { 0, 4, 5, 6, 7 } )
      m[row] |= uint8_t( 1u << ( ( row + k ) % 8 ) );
  }
  return m;
}

using word4 = std::array<literal, 4>;
using word8 = std::array<literal, 8>;

word8 linear_layer( aig& g, bit_matrix const& m, word8 const& x, uint8_t constant = 0 )
{
  word8 out{};
  for ( int row = 0; row < 8; ++row )
  {
    literal acc = lit_false;
    for ( int col = 0; col < 8; ++col )
    {
      if ( ( m[row] >> col ) & 1u )
        acc = g.add_xor( acc, x[col] );
    }
    out[row] = lit_not_cond( acc, ( constant >> row ) & 1u );
  }
  return out;
}

word4 xor4( aig& g, word4 const& a, word4 const& b )
{
  word4 r{};
  for ( int i = 0; i < 4; ++i )
    r[i] = g.add_xor( a[i], b[i] );
  return r;
}

word4 gf16_mul_circuit( aig& g, word4 const& a, word4 const& b )
{
  std::array<literal, 7> product;
  product.fill( lit_false );
  for ( int i = 0; i < 4; ++i )
  {
    for ( int j = 0; j < 4; ++j )
      product[i + j] = g.add_xor( product[i + j], g.add_and( a[i], b[j] ) );
  }
  /* reduce modulo x^4 + x + 1 */
  for ( int i = 6; i >= 4; --i )
  {
    product[i - 4] = g.add_xor( product[i - 4], product[i] );
    product[i - 3] = g.add_xor( product[i - 3], product[i] );
  }
  return { product[0], product[1], product[2], product[3] };
}

/* GF(2)-linear map on 4 bits given by its values on the basis vectors */
word4 gf16_linear( aig& g, word4 const& a, std::array<uint8_t, 4> const& images )
{
  word4 r{ lit_false, lit_false, lit_false, lit_false };
  for ( int bit = 0; bit < 4; ++bit )
  {
    for ( int i = 0; i < 4; ++i )
    {
      if ( ( images[i] >> bit ) & 1u )
        r[bit] = g.add_xor( r[bit], a[i] );
    }
  }
  return r;
}

word4 gf16_square_scale( aig& g, word4 const& a, uint8_t scale )
{
  std::array<uint8_t, 4> images{};
  for ( int i = 0; i < 4; ++i )
  {
    auto const e = uint8_t( 1u << i );
    images[i] = gf16_mul( gf16_mul( e, e ), scale );
  }
  return gf16_linear( g, a, images );
}

word4 gf16_inverse_circuit( aig& g, word4 const& a )
{
  word4 r{};
  for ( int bit = 0; bit < 4; ++bit )
  {
    uint64_t tt = 0;
    for ( uint8_t x = 0; x < 16; ++x )
    {
      if ( ( gf16_inverse( x ) >> bit ) & 1u )
        tt |= uint64_t( 1 ) << x;
    }
    auto const sub = detail::synthesize_sop( tt, 4 );
    r[bit] = detail::insert_subgraph( g, sub, a );
  }
  return r;
}

word8 sbox_core( aig& g, word8 const& x )
{
  auto const& t = tower_basis();
  auto const lambda = t.field.lambda;
  auto const c = linear_layer( g, t.to_composite, x );
  word4 const low{ c[0], c[1], c[2], c[3] };
  word4 const high{ c[4], c[5], c[6], c[7] };

  /* d = lambda*h^2 + h*l + l^2 ; inverse = (h*d^-1, (h+l)*d^-1) */
  auto const d = xor4( g, xor4( g, gf16_square_scale( g, high, lambda ), gf16_mul_circuit( g, high, low ) ), gf16_square_scale( g, low, 1u ) );
  auto const d_inv = gf16_inverse_circuit( g, d );
  auto const inv_high = gf16_mul_circuit( g, high, d_inv );
  auto const inv_low = gf16_mul_circuit( g, xor4( g, high, low ), d_inv );

  word8 const inv{ inv_low[0], inv_low[1], inv_low[2], inv_low[3], inv_high[0], inv_high[1], inv_high[2], inv_high[3] };
  return linear_layer( g, multiply( affine_matrix(), t.from_composite ), inv, affine_constant );
}

/* Shannon expansion on the high nibble: one-hot decoder times SOP cofactors of the low nibble, ORed as a chain */
word8 sbox_table( aig& g, word8 const& x )
{
  auto const& s = aes_sbox();
  std::array<literal, 4> lo_pair{}, hi_pair{};
  for ( uint32_t v = 0; v < 4u; ++v )
  {
    lo_pair[v] = g.add_and( lit_not_cond( x[4], !( v & 1u ) ), lit_not_cond( x[5], !( v & 2u ) ) );
    hi_pair[v] = g.add_and( lit_not_cond( x[6], !( v & 1u ) ), lit_not_cond( x[7], !( v & 2u ) ) );
  }
  std::array<literal, 16> minterm{};
  for ( uint32_t h = 0; h < 16u; ++h )
    minterm[h] = g.add_and( lo_pair[h & 3u], hi_pair[h >> 2] );

  word4 const low{ x[0], x[1], x[2], x[3] };
  word8 out{};
  for ( uint32_t bit = 0; bit < 8u; ++bit )
  {
    literal acc = lit_false;
    for ( uint32_t h = 0; h < 16u; ++h )
    {
      uint64_t tt = 0;
      for ( uint32_t l = 0; l < 16u; ++l )
      {
        if ( ( s[( h << 4 ) | l] >> bit ) & 1u )
          tt |= uint64_t( 1 ) << l;
      }
      auto const cofactor = detail::insert_subgraph( g, detail::synthesize_sop( tt, 4 ), low );
      acc = g.add_or( acc, g.add_and( minterm[h], cofactor ) );
    }
    out[bit] = acc;
  }
  return out;
}

} // namespace

uint8_t gf256_mul( uint8_t a, uint8_t b )
{
  uint8_t r = 0;
  while ( b )
  {
    if ( b & 1u )
      r ^= a;
    a = uint8_t( ( a << 1 ) ^ ( ( a & 0x80u ) ? 0x1bu : 0u ) );
    b >>= 1;
  }
  return r;
}

uint8_t gf256_inverse( uint8_t a )
{
  if ( a == 0u )
    return 0u;
  /* a^254 */
  uint8_t r = 1, base = a;
  for ( int e = 254; e > 0; e >>= 1 )
  {
    if ( e & 1 )
      r = gf256_mul( r, base );
    base = gf256_mul( base, base );
  }
  return r;
}

std::array<uint8_t, 256> const& aes_sbox()
{
  static auto const table = []() {
    std::array<uint8_t, 256> s{};
    auto const affine = affine_matrix();
    for ( int x = 0; x < 256; ++x )
      s[x] = uint8_t( apply( affine, gf256_inverse( uint8_t( x ) ) ) ^ affine_constant );
    return s;
  }();
  return table;
}

aig build_aes_byte( uint8_t key, bool expose_key, sbox_style style )
{
  aig g( expose_key ? 16u : 8u );
  word8 x{};
  for ( uint32_t i = 0; i < 8; ++i )
  {
    if ( expose_key )
      x[i] = g.add_xor( g.input( i ), g.input( 8u + i ) );
    else
      x[i] = lit_not_cond( g.input( i ), ( key >> i ) & 1u );
  }
  for ( auto o : style == sbox_style::table ? sbox_table( g, x ) : sbox_core( g, x ) )
    g.add_output( o );
  return g.cleanup();
}

aig build_sbox_aig()
{
  return build_aes_byte( 0u, false );
}

} // namespace secsyn
