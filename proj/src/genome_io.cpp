#include "mdlnn/genome_io.hpp"

#include <fstream>
#include <sstream>

namespace mdlnn {

void save_genome(const Network& net, const EncodingConfig& cfg, const std::string& path) {
    const Bits payload = encode_network(net, cfg);
    Bits file;
    file.append(encode_integer(net.n_inputs));
    file.append(encode_integer(net.n_outputs));
    file.append(encode_integer(payload.size()));
    file.append(payload);
    const auto bytes = file.pack_bytes();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path);
}

Network load_genome(const std::string& path, const EncodingConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open genome file " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const Bits all = Bits::unpack_bytes(bytes);
    BitReader reader(all);
    const uint64_t n_in = decode_integer(reader);
    const uint64_t n_out = decode_integer(reader);
    const uint64_t bit_length = decode_integer(reader);
    if (reader.remaining() < bit_length)
        throw CodecError(path + ": payload shorter than the declared bit length", reader.pos());
    Bits payload;
    for (uint64_t i = 0; i < bit_length; ++i) payload.push_back(reader.read());
    while (!reader.at_end()) {
        if (reader.read() != 0)
            throw CodecError(path + ": nonzero padding after the payload", reader.pos() - 1);
    }
    return decode_network(payload, static_cast<uint32_t>(n_in), static_cast<uint32_t>(n_out), cfg);
}

std::string network_to_text(const Network& net) {
    std::ostringstream os;
    os << "inputs " << net.n_inputs << "\n";
    os << "outputs " << net.n_outputs << "\n";
    os << "units " << net.n_units() << "\n";
    for (uint32_t i = 0; i < net.n_units(); ++i) {
        const Unit& u = net.units[i];
        if (net.is_input(i) && u.activation == Activation::Linear && !u.bias &&
            u.aggregation == Aggregation::Sum)
            continue;  // inputs are linear by convention
        os << "unit " << i + 1 << " " << activation_name(u.activation);
        if (u.aggregation == Aggregation::Product) os << " product";
        if (u.bias) os << " bias " << u.bias->str();
        os << "\n";
    }
    for (uint32_t i = 0; i < net.n_units(); ++i)
        for (const Connection& c : net.units[i].outgoing)
            os << "conn " << i + 1 << " -> " << c.target + 1 << " " << c.weight.str() << " "
               << (c.kind == ConnKind::Recurrent ? "recurrent" : "forward") << "\n";
    return os.str();
}

Network network_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Network net;
    bool sized = false;
    uint64_t n_in = 0, n_out = 0, n_units = 0;
    auto ensure_sized = [&]() {
        if (sized) return;
        if (n_in == 0 || n_out == 0 || n_units < n_in + n_out)
            throw std::runtime_error("network text: inputs/outputs/units header missing or inconsistent");
        net.n_inputs = static_cast<uint32_t>(n_in);
        net.n_outputs = static_cast<uint32_t>(n_out);
        net.units.resize(n_units);
        sized = true;
    };
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("network text line " + std::to_string(line_no) + ": " + why);
        };
        if (key == "inputs") { if (!(ls >> n_in)) fail("malformed inputs"); }
        else if (key == "outputs") { if (!(ls >> n_out)) fail("malformed outputs"); }
        else if (key == "units") { if (!(ls >> n_units)) fail("malformed units"); }
        else if (key == "unit") {
            ensure_sized();
            uint64_t idx;
            std::string act;
            if (!(ls >> idx >> act)) fail("malformed unit line");
            if (idx < 1 || idx > net.n_units()) fail("unit index out of range");
            auto a = activation_from_name(act);
            if (!a) fail("unknown activation " + act);
            Unit& u = net.units[idx - 1];
            u.activation = *a;
            std::string token;
            while (ls >> token) {
                if (token == "product") u.aggregation = Aggregation::Product;
                else if (token == "bias") {
                    std::string frac;
                    if (!(ls >> frac)) fail("bias without a value");
                    u.bias = Rational::parse(frac);
                } else fail("unexpected token " + token);
            }
        } else if (key == "conn") {
            ensure_sized();
            uint64_t src, dst;
            std::string arrow, frac, kind;
            if (!(ls >> src >> arrow >> dst >> frac >> kind) || arrow != "->")
                fail("malformed conn line");
            if (src < 1 || src > net.n_units() || dst < 1 || dst > net.n_units())
                fail("connection endpoint out of range");
            ConnKind k;
            if (kind == "forward") k = ConnKind::Forward;
            else if (kind == "recurrent") k = ConnKind::Recurrent;
            else fail("unknown connection kind " + kind);
            net.units[src - 1].outgoing.push_back(
                Connection{static_cast<uint32_t>(dst - 1), Rational::parse(frac), k});
        } else fail("unknown keyword " + key);
    }
    ensure_sized();
    net.sort_connections();
    net.validate();
    return net;
}

void save_network_text(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << network_to_text(net);
}

Network load_network_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network text file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return network_from_text(buffer.str());
}

void export_dot(const Network& net, std::ostream& out) {
    out << "digraph network {\n";
    out << "  rankdir=LR;\n";
    for (uint32_t i = 0; i < net.n_units(); ++i) {
        const Unit& u = net.units[i];
        out << "  u" << i + 1 << " [label=\"" << i + 1 << "\\n" << activation_name(u.activation);
        if (u.aggregation == Aggregation::Product) out << " (x)";
        if (u.bias) out << "\\nbias " << u.bias->str();
        out << "\"";
        if (net.is_input(i)) out << ", shape=box, style=filled, fillcolor=lightyellow";
        else if (net.is_output(i)) out << ", style=filled, fillcolor=lightblue";
        out << "];\n";
    }
    for (uint32_t i = 0; i < net.n_units(); ++i)
        for (const Connection& c : net.units[i].outgoing) {
            out << "  u" << i + 1 << " -> u" << c.target + 1 << " [label=\"" << c.weight.str() << "\"";
            if (c.kind == ConnKind::Recurrent) out << ", style=dashed";
            out << "];\n";
        }
    out << "}\n";
}

std::string export_dot(const Network& net) {
    std::ostringstream os;
    export_dot(net, os);
    return os.str();
}

}  // namespace mdlnn
