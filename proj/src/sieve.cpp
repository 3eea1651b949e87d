#include "hopscotch/sieve.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>

namespace hopscotch::sieve {

struct Sieve::Node {
    Kind kind = Kind::Leaf;
    Residue residue{1, 0};
    std::vector<Sieve> operands;
};

namespace {

// Above this period generate() evaluates the range directly instead of
// tiling one period's bitmap.
constexpr std::int64_t kMaxTiledPeriod = std::int64_t{1} << 22;

using Bitmap = std::vector<std::uint8_t>;

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + what),
      position_(position) {}

std::int64_t euclid_mod(std::int64_t n, std::int64_t m) noexcept {
    const std::int64_t r = n % m;
    return r < 0 ? r + m : r;
}

Residue::Residue(std::int64_t modulus, std::int64_t shift) : modulus_(modulus), shift_(0) {
    if (modulus < 1) {
        throw DomainError("modulus must be ≥ 1");
    }
    shift_ = euclid_mod(shift, modulus);
}

Sieve::Sieve(Residue leaf) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Leaf;
    node->residue = leaf;
    node_ = std::move(node);
}

Sieve operator|(const Sieve& a, const Sieve& b) {
    auto node = std::make_shared<Sieve::Node>();
    node->kind = Sieve::Kind::Union;
    node->operands = {a, b};
    return Sieve(std::shared_ptr<const Sieve::Node>(std::move(node)));
}

Sieve operator&(const Sieve& a, const Sieve& b) {
    auto node = std::make_shared<Sieve::Node>();
    node->kind = Sieve::Kind::Intersection;
    node->operands = {a, b};
    return Sieve(std::shared_ptr<const Sieve::Node>(std::move(node)));
}

Sieve operator!(const Sieve& a) {
    auto node = std::make_shared<Sieve::Node>();
    node->kind = Sieve::Kind::Complement;
    node->operands = {a};
    return Sieve(std::shared_ptr<const Sieve::Node>(std::move(node)));
}

Sieve::Kind Sieve::kind() const noexcept { return node_->kind; }

const Residue& Sieve::residue() const {
    if (node_->kind != Kind::Leaf) {
        throw std::logic_error("residue() on a non-leaf sieve node");
    }
    return node_->residue;
}

const Sieve& Sieve::left() const {
    if (node_->kind == Kind::Leaf) {
        throw std::logic_error("left() on a leaf sieve node");
    }
    return node_->operands[0];
}

const Sieve& Sieve::right() const {
    if (node_->kind != Kind::Union && node_->kind != Kind::Intersection) {
        throw std::logic_error("right() on a sieve node without a right operand");
    }
    return node_->operands[1];
}

bool Sieve::contains(std::int64_t n) const noexcept {
    switch (node_->kind) {
    case Kind::Leaf: return node_->residue.contains(n);
    case Kind::Union: return left().contains(n) || right().contains(n);
    case Kind::Intersection: return left().contains(n) && right().contains(n);
    case Kind::Complement: return !left().contains(n);
    }
    return false;
}

namespace {

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    const std::int64_t g = std::gcd(a, b);
    const std::int64_t q = a / g;
    if (q > std::numeric_limits<std::int64_t>::max() / b) {
        throw DomainError("sieve period exceeds 64-bit range");
    }
    return q * b;
}

}  // namespace

std::int64_t Sieve::period() const {
    switch (node_->kind) {
    case Kind::Leaf: return node_->residue.modulus();
    case Kind::Complement: return left().period();
    case Kind::Union:
    case Kind::Intersection: return checked_lcm(left().period(), right().period());
    }
    return 1;
}

namespace {

// Membership over one period [0, L) computed with set operations on bitmaps.
Bitmap node_bitmap(const Sieve& node, std::int64_t period) {
    const auto size = static_cast<std::size_t>(period);
    switch (node.kind()) {
    case Sieve::Kind::Leaf: {
        Bitmap bits(size, 0);
        const auto& leaf = node.residue();
        for (std::int64_t k = leaf.shift(); k < period; k += leaf.modulus()) {
            bits[static_cast<std::size_t>(k)] = 1;
        }
        return bits;
    }
    case Sieve::Kind::Complement: {
        Bitmap bits = node_bitmap(node.left(), period);
        for (auto& b : bits) {
            b = static_cast<std::uint8_t>(b ^ 1U);
        }
        return bits;
    }
    case Sieve::Kind::Union:
    case Sieve::Kind::Intersection: {
        Bitmap lhs = node_bitmap(node.left(), period);
        const Bitmap rhs = node_bitmap(node.right(), period);
        const bool is_union = node.kind() == Sieve::Kind::Union;
        for (std::size_t i = 0; i < size; ++i) {
            lhs[i] = static_cast<std::uint8_t>(is_union ? (lhs[i] | rhs[i]) : (lhs[i] & rhs[i]));
        }
        return lhs;
    }
    }
    return {};
}

int precedence(Sieve::Kind kind) {
    switch (kind) {
    case Sieve::Kind::Union: return 1;
    case Sieve::Kind::Intersection: return 2;
    default: return 3;
    }
}

void print(const Sieve& node, std::string& out, int min_prec) {
    const int prec = precedence(node.kind());
    const bool parens = prec < min_prec;
    if (parens) {
        out += '(';
    }
    switch (node.kind()) {
    case Sieve::Kind::Leaf:
        out += std::to_string(node.residue().modulus());
        out += '@';
        out += std::to_string(node.residue().shift());
        break;
    case Sieve::Kind::Complement:
        out += '!';
        print(node.left(), out, 3);
        break;
    case Sieve::Kind::Union:
    case Sieve::Kind::Intersection:
        // The parser is left-associative, so a same-level right operand needs parentheses.
        print(node.left(), out, prec);
        out += node.kind() == Sieve::Kind::Union ? '|' : '&';
        print(node.right(), out, prec + 1);
        break;
    }
    if (parens) {
        out += ')';
    }
}


class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Sieve parse() {
        skip_ws();
        if (pos_ == text_.size()) {
            throw ParseError("empty expression", pos_);
        }
        Sieve result = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        return result;
    }

private:
    Sieve expr() {
        Sieve lhs = term();
        while (accept('|')) {
            lhs = lhs | term();
        }
        return lhs;
    }

    Sieve term() {
        Sieve lhs = factor();
        while (accept('&')) {
            lhs = lhs & factor();
        }
        return lhs;
    }

    Sieve factor() {
        skip_ws();
        if (accept('!')) {
            return !factor();
        }
        if (accept('(')) {
            Sieve inner = expr();
            if (!accept(')')) {
                throw ParseError("expected ')'", position());
            }
            return inner;
        }
        const std::size_t at = position();
        const std::int64_t modulus = integer("modulus");
        if (!accept('@')) {
            throw ParseError("expected '@' after modulus", position());
        }
        const std::int64_t shift = integer("shift");
        if (modulus < 1) {
            throw DomainError("modulus must be ≥ 1 (at position " + std::to_string(at) + ")");
        }
        return Residue(modulus, shift);
    }

    std::int64_t integer(const char* what) {
        skip_ws();
        const std::size_t start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            negative = text_[pos_] == '-';
            ++pos_;
        }
        if (pos_ == text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            throw ParseError(std::string("expected integer ") + what, start);
        }
        std::int64_t value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            const int digit = text_[pos_] - '0';
            if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) {
                throw ParseError(std::string("integer ") + what + " out of range", start);
            }
            value = value * 10 + digit;
            ++pos_;
        }
        return negative ? -value : value;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::size_t position() {
        skip_ws();
        return pos_;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string Sieve::to_string() const {
    std::string out;
    print(*this, out, 0);
    return out;
}

bool operator==(const Sieve& a, const Sieve& b) {
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case Sieve::Kind::Leaf: return a.residue() == b.residue();
    case Sieve::Kind::Complement: return a.left() == b.left();
    default: return a.left() == b.left() && a.right() == b.right();
    }
}

Sieve parse(std::string_view text) { return Parser(text).parse(); }

PointSet generate(const Sieve& sieve, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
        throw std::invalid_argument("generate: lo must be ≤ hi");
    }
    PointSet result;
    result.period = sieve.period();

    // Range width as unsigned to survive extreme bounds.
    const auto width = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (result.period <= kMaxTiledPeriod) {
        const Bitmap bits = node_bitmap(sieve, result.period);
        std::int64_t phase = euclid_mod(lo, result.period);
        for (std::uint64_t k = 0;; ++k) {
            if (bits[static_cast<std::size_t>(phase)] != 0) {
                result.points.push_back(lo + static_cast<std::int64_t>(k));
            }
            if (k == width) {
                break;
            }
            if (++phase == result.period) {
                phase = 0;
            }
        }
    } else {
        for (std::uint64_t k = 0;; ++k) {
            const std::int64_t n = lo + static_cast<std::int64_t>(k);
            if (sieve.contains(n)) {
                result.points.push_back(n);
            }
            if (k == width) {
                break;
            }
        }
    }
    return result;
}

std::vector<std::int64_t> intervals(const PointSet& points) {
    if (points.points.size() < 2) {
        throw std::invalid_argument("need at least two points");
    }
    std::vector<std::int64_t> out;
    out.reserve(points.points.size() - 1);
    for (std::size_t i = 1; i < points.points.size(); ++i) {
        out.push_back(points.points[i] - points.points[i - 1]);
    }
    return out;
}

int to_pitch(const Sieve& sieve, std::int64_t degree, int base_midi) {
    const std::int64_t period = sieve.period();
    const PointSet scale = generate(sieve, 0, period - 1);
    if (scale.points.empty()) {
        throw DomainError("sieve generates no pitches");
    }
    const auto n = static_cast<std::int64_t>(scale.points.size());
    const std::int64_t step = euclid_mod(degree, n);
    const std::int64_t wraps = (degree - step) / n;
    __extension__ using Wide = __int128;
    const Wide pitch = static_cast<Wide>(base_midi) + scale.points[static_cast<std::size_t>(step)] +
                       static_cast<Wide>(period) * wraps;
    return static_cast<int>(std::clamp<Wide>(pitch, 0, 127));
}

}  // namespace hopscotch::sieve
