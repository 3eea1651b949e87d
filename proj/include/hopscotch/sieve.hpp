// Xenakis sieves: residue classes combined by union, intersection and
// complement, used as the generative pitch source.
//
// Text form:
//   expr   := term ('|' term)*
//   term   := factor ('&' factor)*
//   factor := '!' factor | '(' expr ')' | INT '@' INT
// so "3@0|4@1" is the union of {n : n = 0 mod 3} and {n : n = 1 mod 4}.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hopscotch::sieve {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Euclidean remainder: result in [0, m) for m >= 1, for negative n too.
std::int64_t euclid_mod(std::int64_t n, std::int64_t m) noexcept;

/// The congruence class {n : n = shift (mod modulus)}, shift kept in [0, modulus).
class Residue {
public:
    /// Throws DomainError("modulus must be ≥ 1") for modulus < 1.
    Residue(std::int64_t modulus, std::int64_t shift);

    std::int64_t modulus() const noexcept { return modulus_; }
    std::int64_t shift() const noexcept { return shift_; }
    bool contains(std::int64_t n) const noexcept { return euclid_mod(n, modulus_) == shift_; }

    friend bool operator==(const Residue&, const Residue&) = default;

private:
    std::int64_t modulus_;
    std::int64_t shift_;
};

/// Immutable expression tree; copies share nodes.
class Sieve {
public:
    enum class Kind { Leaf, Union, Intersection, Complement };

    Sieve(Residue leaf);  // NOLINT(google-explicit-constructor)
    Sieve(std::int64_t modulus, std::int64_t shift) : Sieve(Residue(modulus, shift)) {}

    friend Sieve operator|(const Sieve& a, const Sieve& b);
    friend Sieve operator&(const Sieve& a, const Sieve& b);
    friend Sieve operator!(const Sieve& a);

    Kind kind() const noexcept;
    /// Leaf only.
    const Residue& residue() const;
    /// Left operand, or the child of a complement.
    const Sieve& left() const;
    /// Right operand of a union or intersection.
    const Sieve& right() const;

    bool contains(std::int64_t n) const noexcept;

    /// lcm of all leaf moduli. Throws DomainError if it exceeds int64.
    std::int64_t period() const;

    /// Text form with minimal parentheses; parse(to_string()) == *this.
    std::string to_string() const;

    friend bool operator==(const Sieve& a, const Sieve& b);

private:
    struct Node;
    explicit Sieve(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Throws ParseError (with position) or DomainError.
Sieve parse(std::string_view text);

struct PointSet {
    std::vector<std::int64_t> points;
    std::int64_t period = 1;

    friend bool operator==(const PointSet&, const PointSet&) = default;
};

/// Every n in [lo, hi] the sieve contains, ascending. Throws
/// std::invalid_argument if lo > hi.
PointSet generate(const Sieve& sieve, std::int64_t lo, std::int64_t hi);

/// Successive differences. Throws std::invalid_argument("need at least two points").
std::vector<std::int64_t> intervals(const PointSet& points);

/// Maps a scale degree to a MIDI note: with S the sieve's points in one
/// period [0, L) and n = |S|, base + S[degree mod n] + L * (degree div n),
/// clamped to 0..127. Throws DomainError("sieve generates no pitches").
int to_pitch(const Sieve& sieve, std::int64_t degree, int base_midi);

}  // namespace hopscotch::sieve
