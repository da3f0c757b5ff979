#pragma once

#include <iosfwd>
#include <string>

#include "mdlnn/codec.hpp"
#include "mdlnn/network.hpp"

namespace mdlnn {

// Canonical genome file: E(n_inputs) ++ E(n_outputs) ++ E(bit_length) ++
// network bitstring, packed MSB-first and zero-padded to a byte boundary.
// The encoding configuration travels out-of-band (CLI flags).
void save_genome(const Network& net, const EncodingConfig& cfg, const std::string& path);
Network load_genome(const std::string& path, const EncodingConfig& cfg);

// Human-readable structured text form (the bitstring form is authoritative).
std::string network_to_text(const Network& net);
Network network_from_text(const std::string& text);
void save_network_text(const Network& net, const std::string& path);
Network load_network_text(const std::string& path);

// Graphviz DOT export: units labeled by activation, edges by weight
// fraction; recurrent connections are dashed.
void export_dot(const Network& net, std::ostream& out);
std::string export_dot(const Network& net);

}  // namespace mdlnn
