#include "mdlnn/codec.hpp"

#include <sstream>

namespace mdlnn {

EncodingConfig EncodingConfig::base_six() {
    return {{Activation::Linear, Activation::Sigmoid, Activation::Square, Activation::ReLU,
             Activation::Floor, Activation::Step},
            false};
}

EncodingConfig EncodingConfig::small_four() {
    return {{Activation::Linear, Activation::Sigmoid, Activation::Square, Activation::ReLU}, false};
}

EncodingConfig EncodingConfig::extended() {
    return {{Activation::Linear, Activation::Sigmoid, Activation::Square, Activation::ReLU,
             Activation::Floor, Activation::Step, Activation::Modulo3},
            true};
}

int EncodingConfig::id_width() const {
    int width = 1;
    while ((1u << width) < enabled.size()) ++width;
    return width;
}

int EncodingConfig::id_of(Activation a) const {
    for (size_t i = 0; i < enabled.size(); ++i)
        if (enabled[i] == a) return static_cast<int>(i);
    throw InvalidNetworkError(std::string("activation ") + activation_name(a) +
                              " not enabled by this configuration");
}

Activation EncodingConfig::kind_of(uint32_t id) const {
    if (id >= enabled.size())
        throw std::out_of_range("activation id " + std::to_string(id) + " out of range");
    return enabled[id];
}

bool EncodingConfig::allows(Activation a) const {
    for (Activation e : enabled)
        if (e == a) return true;
    return false;
}

void EncodingConfig::check() const {
    if (enabled.empty()) throw std::invalid_argument("encoding config: empty activation set");
    if (!allows(Activation::Linear))
        throw std::invalid_argument("encoding config: linear activation is mandatory");
    if (allows(Activation::Modulo3) != extension)
        throw std::invalid_argument("encoding config: mod3 is enabled iff the extension set is on");
    for (size_t i = 1; i < enabled.size(); ++i)
        if (enabled[i - 1] >= enabled[i])
            throw std::invalid_argument("encoding config: activations must follow canonical order");
}

std::string EncodingConfig::str() const {
    std::ostringstream os;
    for (size_t i = 0; i < enabled.size(); ++i) {
        if (i) os << ',';
        os << activation_name(enabled[i]);
    }
    if (extension) os << " +extension";
    return os.str();
}

static int bitlen(uint64_t n) {
    int len = 0;
    while (n) { ++len; n >>= 1; }
    return len;
}

Bits encode_integer(uint64_t n) {
    Bits out;
    if (n == 0) {
        out.push_back(0);
        return out;
    }
    const int len = bitlen(n);
    out.append_run(1, static_cast<size_t>(len));
    out.push_back(0);
    for (int i = len - 1; i >= 0; --i) out.push_back(static_cast<int>((n >> i) & 1));
    return out;
}

uint64_t decode_integer(BitReader& reader) {
    const size_t start = reader.pos();
    int len = 0;
    for (;;) {
        if (reader.at_end()) throw CodecError("unterminated unary length run", start);
        if (reader.read() == 0) break;
        if (++len > 63) throw CodecError("integer payload wider than 63 bits", start);
    }
    if (len == 0) return 0;
    uint64_t n = 0;
    for (int i = 0; i < len; ++i) {
        if (reader.at_end()) throw CodecError("truncated integer payload", reader.pos());
        n = (n << 1) | static_cast<uint64_t>(reader.read());
    }
    if ((n >> (len - 1)) != 1)
        throw CodecError("integer payload has a leading zero (non-canonical)", start);
    return n;
}

std::pair<uint64_t, Bits> decode_integer_with_remainder(const Bits& bits) {
    BitReader reader(bits);
    uint64_t n = decode_integer(reader);
    Bits rest;
    while (!reader.at_end()) rest.push_back(reader.read());
    return {n, rest};
}

Bits encode_weight(const Rational& w) {
    Bits out;
    out.push_back(w.sign > 0 ? 1 : 0);
    out.append(encode_integer(w.num));
    out.append(encode_integer(w.den));
    return out;
}

Rational decode_weight(BitReader& reader) {
    const size_t start = reader.pos();
    if (reader.at_end()) throw CodecError("truncated weight (missing sign bit)", start);
    const int sign = reader.read() ? +1 : -1;
    const uint64_t num = decode_integer(reader);
    const uint64_t den = decode_integer(reader);
    if (den == 0) throw CodecError("weight denominator is zero", start);
    if (num == 0 && sign < 0)
        throw CodecError("non-canonical negative zero weight", start);
    return Rational(sign, num, den);
}

void validate_network(const Network& net, const EncodingConfig& cfg) {
    cfg.check();
    net.validate();
    for (uint32_t i = 0; i < net.n_units(); ++i) {
        const Unit& u = net.units[i];
        if (!cfg.allows(u.activation))
            throw InvalidNetworkError(std::string("unit ") + std::to_string(i + 1) + " uses disabled activation " +
                                      activation_name(u.activation));
        if (u.aggregation == Aggregation::Product && !cfg.extension)
            throw InvalidNetworkError("product aggregation requires the extension set (unit " +
                                      std::to_string(i + 1) + ")");
        if (net.is_input(i) && u.aggregation == Aggregation::Product)
            throw InvalidNetworkError("input unit " + std::to_string(i + 1) + " cannot be a product unit");
    }
}

Bits encode_network(const Network& net, const EncodingConfig& cfg) {
    validate_network(net, cfg);
    const int width = cfg.id_width();
    Bits out = encode_integer(net.n_units());
    for (const Unit& u : net.units) {
        const int id = cfg.id_of(u.activation);
        for (int b = width - 1; b >= 0; --b) out.push_back((id >> b) & 1);
        if (cfg.extension) out.push_back(u.aggregation == Aggregation::Product ? 1 : 0);
        if (u.bias) {
            out.push_back(1);
            out.append(encode_weight(*u.bias));
        } else {
            out.push_back(0);
        }
        out.append(encode_integer(u.outgoing.size()));
        for (const Connection& c : u.outgoing) {
            out.append(encode_integer(c.target + 1));  // unit numbers are 1-based on the wire
            out.append(encode_weight(c.weight));
            out.push_back(c.kind == ConnKind::Recurrent ? 1 : 0);
        }
        out.append_run(1, static_cast<size_t>(activation_cost_bits(u.activation)));
    }
    return out;
}

Network decode_network(const Bits& bits, uint32_t n_inputs, uint32_t n_outputs,
                       const EncodingConfig& cfg) {
    cfg.check();
    BitReader reader(bits);
    const uint64_t n_units = decode_integer(reader);
    if (n_units < n_inputs + n_outputs)
        throw CodecError("unit count smaller than inputs + outputs", 0);
    if (n_units > (1u << 20)) throw CodecError("implausible unit count", 0);

    Network net;
    net.n_inputs = n_inputs;
    net.n_outputs = n_outputs;
    net.units.resize(n_units);
    const int width = cfg.id_width();

    for (uint64_t i = 0; i < n_units; ++i) {
        Unit& u = net.units[i];
        const size_t unit_start = reader.pos();
        uint32_t id = 0;
        for (int b = 0; b < width; ++b) {
            if (reader.at_end()) throw CodecError("truncated activation id", reader.pos());
            id = (id << 1) | static_cast<uint32_t>(reader.read());
        }
        if (id >= cfg.enabled.size())
            throw CodecError("activation id " + std::to_string(id) + " not in the enabled set", unit_start);
        u.activation = cfg.kind_of(id);
        if (cfg.extension) {
            if (reader.at_end()) throw CodecError("truncated aggregation bit", reader.pos());
            u.aggregation = reader.read() ? Aggregation::Product : Aggregation::Sum;
        }
        if (reader.at_end()) throw CodecError("truncated bias flag", reader.pos());
        if (reader.read()) u.bias = decode_weight(reader);
        const uint64_t n_out = decode_integer(reader);
        u.outgoing.reserve(n_out);
        for (uint64_t k = 0; k < n_out; ++k) {
            const size_t conn_start = reader.pos();
            const uint64_t target1 = decode_integer(reader);
            if (target1 == 0 || target1 > n_units)
                throw CodecError("connection target " + std::to_string(target1) + " out of range", conn_start);
            Connection c;
            c.target = static_cast<uint32_t>(target1 - 1);
            c.weight = decode_weight(reader);
            if (reader.at_end()) throw CodecError("truncated connection kind bit", reader.pos());
            c.kind = reader.read() ? ConnKind::Recurrent : ConnKind::Forward;
            if (!u.outgoing.empty()) {
                const Connection& prev = u.outgoing.back();
                if (prev.target > c.target || (prev.target == c.target && prev.kind >= c.kind))
                    throw CodecError("connections not in canonical (target, kind) order", conn_start);
            }
            u.outgoing.push_back(c);
        }
        const int cost = activation_cost_bits(u.activation);
        for (int b = 0; b < cost; ++b) {
            if (reader.at_end()) throw CodecError("truncated activation cost run", reader.pos());
            if (reader.read() != 1) throw CodecError("activation cost run broken", reader.pos() - 1);
        }
    }
    if (!reader.at_end())
        throw CodecError("trailing bits after network encoding", reader.pos());
    try {
        validate_network(net, cfg);
    } catch (const InvalidNetworkError& e) {
        throw CodecError(std::string("decoded network invalid: ") + e.what(), reader.pos());
    }
    return net;
}

uint64_t grammar_cost(const Network& net, const EncodingConfig& cfg) {
    return encode_network(net, cfg).size();
}

}  // namespace mdlnn
