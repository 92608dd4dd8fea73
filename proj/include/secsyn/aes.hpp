#pragma once

#include <secsyn/aig.hpp>

#include <array>
#include <cstdint>

namespace secsyn
{

/*! \brief The AES S-box, computed from the GF(2^8) inverse and the affine map. */
std::array<uint8_t, 256> const& aes_sbox();

uint8_t gf256_mul( uint8_t a, uint8_t b );
uint8_t gf256_inverse( uint8_t a );

enum class sbox_style
{
  table, /* two-level expansion of the S-box table: decoded high nibble, SOP cofactors of the low nibble */
  tower  /* composite-field inverse over GF((2^4)^2) and the affine map */
};

/*! \brief AIG computing `SBOX(pt ^ key)` for one byte.
 *
 * Inputs 0..7 are the plaintext bits (LSB first).  With `expose_key` the
 * key occupies inputs 8..15; otherwise it is folded into the circuit as
 * input complements.  Outputs 0..7 are the S-box output bits, LSB first.
 */
aig build_aes_byte( uint8_t key, bool expose_key = false, sbox_style style = sbox_style::table );

/*! \brief Bare S-box AIG (8 inputs, 8 outputs). */
aig build_sbox_aig();

} // namespace secsyn
