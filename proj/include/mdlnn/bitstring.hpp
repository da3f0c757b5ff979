#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdlnn {

// Bit sequence, one bit per byte. Genome encodings are a few hundred bits,
// so clarity wins over packing; pack_bytes() handles file IO.
class Bits {
public:
    Bits() = default;

    void push_back(int bit) { bits_.push_back(static_cast<uint8_t>(bit & 1)); }
    void append(const Bits& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }
    void append_run(int bit, size_t count) { bits_.insert(bits_.end(), count, static_cast<uint8_t>(bit & 1)); }

    size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    uint8_t operator[](size_t i) const { return bits_[i]; }

    bool operator==(const Bits& o) const { return bits_ == o.bits_; }
    bool operator!=(const Bits& o) const { return !(*this == o); }
    bool operator<(const Bits& o) const { return bits_ < o.bits_; }

    std::string str() const {
        std::string s;
        s.reserve(bits_.size());
        for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    static Bits from_string(const std::string& s) {
        Bits out;
        out.bits_.reserve(s.size());
        for (char c : s) {
            if (c == '0') out.bits_.push_back(0);
            else if (c == '1') out.bits_.push_back(1);
            else throw std::invalid_argument("Bits::from_string: invalid character");
        }
        return out;
    }

    // MSB-first packing, zero-padded to a byte boundary.
    std::vector<uint8_t> pack_bytes() const {
        std::vector<uint8_t> out((bits_.size() + 7) / 8, 0);
        for (size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
        return out;
    }

    static Bits unpack_bytes(const std::vector<uint8_t>& bytes) {
        Bits out;
        out.bits_.reserve(bytes.size() * 8);
        for (uint8_t byte : bytes)
            for (int i = 7; i >= 0; --i)
                out.bits_.push_back((byte >> i) & 1);
        return out;
    }

    // Compact key for score caches.
    std::string packed_key() const {
        auto bytes = pack_bytes();
        std::string key(bytes.begin(), bytes.end());
        key.push_back(static_cast<char>(bits_.size() % 8));
        return key;
    }

    // True if this is a (proper or equal) prefix of other.
    bool is_prefix_of(const Bits& other) const {
        if (bits_.size() > other.bits_.size()) return false;
        for (size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] != other.bits_[i]) return false;
        return true;
    }

private:
    std::vector<uint8_t> bits_;
};

// Cursor over a Bits value; decode errors carry the failing bit offset.
class BitReader {
public:
    explicit BitReader(const Bits& bits) : bits_(&bits) {}
    explicit BitReader(Bits&&) = delete;  // must outlive the reader

    size_t pos() const { return pos_; }
    size_t remaining() const { return bits_->size() - pos_; }
    bool at_end() const { return pos_ == bits_->size(); }

    int read() {
        if (pos_ >= bits_->size())
            throw std::out_of_range("BitReader: read past end at bit " + std::to_string(pos_));
        return (*bits_)[pos_++];
    }

    int peek() const {
        if (pos_ >= bits_->size())
            throw std::out_of_range("BitReader: peek past end at bit " + std::to_string(pos_));
        return (*bits_)[pos_];
    }

private:
    const Bits* bits_;
    size_t pos_ = 0;
};

}  // namespace mdlnn
