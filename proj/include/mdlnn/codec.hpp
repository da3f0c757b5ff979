#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mdlnn/bitstring.hpp"
#include "mdlnn/network.hpp"

namespace mdlnn {

struct CodecError : std::runtime_error {
    size_t bit_offset;
    CodecError(const std::string& what, size_t offset)
        : std::runtime_error(what + " (bit " + std::to_string(offset) + ")"), bit_offset(offset) {}
};

// Which activation kinds are available and whether the Dyck-2 extension set
// (Product aggregation + mod3) is on. The activation-id width and the
// presence of the per-unit aggregation bit depend on this, so encode and
// decode must agree on it out-of-band.
struct EncodingConfig {
    std::vector<Activation> enabled;  // subset of the canonical order, ids by position
    bool extension = false;           // Product units legal + aggregation bit emitted

    static EncodingConfig base_six();    // linear, sigmoid, square, relu, floor, step
    static EncodingConfig small_four();  // linear, sigmoid, square, relu (2-bit ids)
    static EncodingConfig extended();    // base_six + mod3, extension on

    int id_width() const;
    int id_of(Activation a) const;  // throws InvalidNetworkError if disabled
    Activation kind_of(uint32_t id) const;
    bool allows(Activation a) const;
    void check() const;  // mod3 enabled <=> extension
    std::string str() const;
};

// Prefix-free integer code: unary(bitlen(n)) ++ "0" ++ binary(n); E(0) = "0".
Bits encode_integer(uint64_t n);

// Inverse; returns (n, bits consumed). Throws CodecError on malformed input.
uint64_t decode_integer(BitReader& reader);
std::pair<uint64_t, Bits> decode_integer_with_remainder(const Bits& bits);

// sign bit ++ E(num) ++ E(den).
Bits encode_weight(const Rational& w);
Rational decode_weight(BitReader& reader);

// Canonical prefix-free encoding of a whole network. Layout per unit:
// activation id, [aggregation bit when extension on], bias flag (+ weight),
// E(#outgoing), per connection E(target+1) ++ weight ++ kind bit, then the
// activation's unary cost bits.
Bits encode_network(const Network& net, const EncodingConfig& cfg);
Network decode_network(const Bits& bits, uint32_t n_inputs, uint32_t n_outputs,
                       const EncodingConfig& cfg);

// |G| = length of the canonical encoding, in bits.
uint64_t grammar_cost(const Network& net, const EncodingConfig& cfg);

// Enforces config-dependent invariants (Product/mod3 only under extension)
// on top of Network::validate().
void validate_network(const Network& net, const EncodingConfig& cfg);

}  // namespace mdlnn
