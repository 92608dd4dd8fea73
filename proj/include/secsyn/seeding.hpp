#pragma once

#include <cstdint>
#include <initializer_list>

namespace secsyn
{

/*! \brief splitmix64 finalizer. */
constexpr uint64_t mix_seed( uint64_t x )
{
  x += 0x9e3779b97f4a7c15ULL;
  x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
  x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebULL;
  return x ^ ( x >> 31 );
}

/*! \brief Derives an independent seed from a base seed and a sequence of indices. */
constexpr uint64_t derive_seed( uint64_t base, std::initializer_list<uint64_t> parts )
{
  auto h = mix_seed( base );
  for ( auto p : parts )
    h = mix_seed( h ^ mix_seed( p + 0x632be59bd9b4e019ULL ) );
  return h;
}

/* uniform double in [0, 1) from a 64-bit hash */
constexpr double unit_interval( uint64_t h )
{
  return double( h >> 11 ) * ( 1.0 / 9007199254740992.0 );
}

} // namespace secsyn
