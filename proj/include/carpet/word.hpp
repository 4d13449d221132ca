/*
 * word.hpp
 *
 * Cell addresses of the planar Sierpinski carpet, their grid boxes,
 * adjacency and the action of the symmetry group of the square.
 */

#ifndef CARPET_WORD_HPP_
#define CARPET_WORD_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace carpet {

using Level = int;

/// Largest level a Word can hold in its 64-bit base-8 code.
inline constexpr Level kMaxWordLevel = 21;

/**
 * A word w = w_1 ... w_n over the alphabet {1,...,8}.
 *
 * Stored as (level, code) where code is the base-8 integer with digit
 * w_k - 1 in position n - k, so the first letter is the most significant.
 * Level-n words are in bijection with {0, ..., 8^n - 1} and the
 * descendants of w at level m form the contiguous code range
 * [code * 8^(m-n), (code + 1) * 8^(m-n)).
 */
class Word {
public:
    Word() = default;
    Word(Level level, std::uint64_t code);

    static Word fromDigits(const std::vector<int>& digits);
    /// Parses "w1w2...wn"; the empty string is the empty word.
    static Word parse(std::string_view text);

    Level level() const noexcept { return level_; }
    std::uint64_t code() const noexcept { return code_; }

    /// k-th letter, 1-based position, value in 1..8.
    int digit(Level k) const;
    std::vector<int> digits() const;

    Word child(int digit) const;
    Word prefix(Level k) const;
    Word concat(const Word& suffix) const;
    /// Strips the first prefix.level() letters; throws if prefix does not match.
    Word stripPrefix(const Word& prefix) const;
    bool hasPrefix(const Word& prefix) const noexcept;

    std::string toString() const;

    auto operator<=>(const Word&) const = default;

private:
    Level level_ = 0;
    std::uint64_t code_ = 0;
};

/// 8^n as an integer.
std::uint64_t pow8(Level n);
/// 3^n as an integer.
std::uint64_t pow3(Level n);

/// Grid offset (cx, cy) in {0,1,2}^2 of a letter inside its parent square.
struct GridOffset {
    int cx;
    int cy;
};

/// The letter -> grid map: 1 (0,0), 2 (1,0), 3 (2,0), 4 (2,1), 5 (2,2), 6 (1,2), 7 (0,2), 8 (0,1).
GridOffset digitOffset(int digit);
/// Inverse of digitOffset; returns 0 for the removed center (1,1).
int offsetDigit(int cx, int cy);

/**
 * The closed square of a level-n cell inside [-1,1]^2, in integer grid
 * coordinates: it is [-1 + 2 col/3^n, -1 + 2 (col+1)/3^n] x (same for row).
 */
struct CellBox {
    std::int64_t col = 0;
    std::int64_t row = 0;
    Level level = 0;

    bool operator==(const CellBox&) const = default;
};

CellBox wordToBox(const Word& w);
/// Inverse of wordToBox; throws std::invalid_argument for boxes inside a removed square.
Word boxToWord(const CellBox& box);
/// True if no base-3 digit pair of (col,row) is (1,1).
bool isCarpetBox(const CellBox& box) noexcept;

/// Cell center in [-1,1]^2.
std::array<double, 2> cellCenter(const Word& w);

enum class Adjacency { None, Corner, Edge };

/// Touching relation of two distinct cells of the same level.
Adjacency cellsAdjacent(const Word& v, const Word& w);
Adjacency boxesAdjacent(const CellBox& a, const CellBox& b) noexcept;

/**
 * An element of D4, following the matrices R_k (rotation by k*pi/2) and
 * S_k = R_k * diag(1,-1) (reflection).
 */
struct SymmetryElement {
    enum class Kind : std::uint8_t { Rotation, Reflection };

    Kind kind = Kind::Rotation;
    int index = 0; // k in {0,1,2,3}

    static SymmetryElement identity() { return {}; }
    static SymmetryElement rotation(int k);
    static SymmetryElement reflection(int k);
    /// All eight elements: R_0..R_3, S_0..S_3.
    static std::array<SymmetryElement, 8> all();

    /// Integer 2x2 matrix, row-major.
    std::array<int, 4> matrix() const;
    /// Position in all(), 0..7.
    int ordinal() const noexcept;
    std::string name() const;

    bool operator==(const SymmetryElement&) const = default;
};

/// (a * b)(x) = a(b(x)).
SymmetryElement compose(const SymmetryElement& a, const SymmetryElement& b);
SymmetryElement inverse(const SymmetryElement& a);

/// The letter permutation tau_Phi restricted to one letter.
int applySymmetryToDigit(const SymmetryElement& phi, int digit);
/// tau_Phi(w): Phi(K_w) = K_{tau_Phi(w)}, acting letter by letter.
Word applySymmetry(const SymmetryElement& phi, const Word& w);
/// Same as applySymmetry, on the code of a level-n word.
std::uint64_t applySymmetryToCode(const SymmetryElement& phi, Level level, std::uint64_t code);

/**
 * Checks the hard-coded letter tables (grid map and the eight D4
 * permutations) against the box geometry and the group law. Throws
 * std::logic_error on the first inconsistency.
 */
void validateTables();

enum class Face { Left, Top, Right, Bottom };

Face parseFace(char c);
char faceName(Face f);

/// Level-n words whose cells touch the given side of [-1,1]^2, ascending.
std::vector<Word> faceWords(Level n, Face face);

/// Exact nonnegative rational with 64-bit parts.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Rational reduced() const;
    double toDouble() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    Rational operator+(const Rational& other) const;
    bool operator==(const Rational& other) const;
};

/// Self-similar measure of K_w: exactly 8^{-|w|}.
Rational cellMeasure(const Word& w);

} // namespace carpet

#endif // CARPET_WORD_HPP_
