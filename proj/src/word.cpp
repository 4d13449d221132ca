/*
 * word.cpp
 */

#include <carpet/word.hpp>

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace carpet {

namespace {

constexpr std::array<GridOffset, 8> kDigitOffsets{{
    {0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1},
}};

// Letter permutation of each D4 element, in the order R_0..R_3, S_0..S_3.
// Entry [e][d - 1] is the image of letter d.
constexpr std::array<std::array<std::uint8_t, 8>, 8> kSymmetryTables{{
    {1, 2, 3, 4, 5, 6, 7, 8},
    {3, 4, 5, 6, 7, 8, 1, 2},
    {5, 6, 7, 8, 1, 2, 3, 4},
    {7, 8, 1, 2, 3, 4, 5, 6},
    {7, 6, 5, 4, 3, 2, 1, 8},
    {1, 8, 7, 6, 5, 4, 3, 2},
    {3, 2, 1, 8, 7, 6, 5, 4},
    {5, 4, 3, 2, 1, 8, 7, 6},
}};

void checkDigit(int d) {
    if (d < 1 || d > 8)
        throw std::invalid_argument("word letter out of range 1..8: " + std::to_string(d));
}

void checkLevel(Level n) {
    if (n < 0 || n > kMaxWordLevel)
        throw std::invalid_argument("word level out of range: " + std::to_string(n));
}

// Run once; a wrong table would silently corrupt every symmetry check downstream.
[[maybe_unused]] const bool kTablesValidated = (validateTables(), true);

} // namespace

std::uint64_t pow8(Level n) {
    checkLevel(n);
    return std::uint64_t{1} << (3 * n);
}

std::uint64_t pow3(Level n) {
    if (n < 0 || n > 40)
        throw std::invalid_argument("pow3 exponent out of range");
    std::uint64_t r = 1;
    for (Level i = 0; i < n; ++i)
        r *= 3;
    return r;
}

Word::Word(Level level, std::uint64_t code) : level_(level), code_(code) {
    checkLevel(level);
    if (level < kMaxWordLevel && code >= pow8(level))
        throw std::invalid_argument("word code out of range for level " + std::to_string(level));
}

Word Word::fromDigits(const std::vector<int>& digits) {
    checkLevel(static_cast<Level>(digits.size()));
    std::uint64_t code = 0;
    for (int d : digits) {
        checkDigit(d);
        code = code * 8 + static_cast<std::uint64_t>(d - 1);
    }
    return Word(static_cast<Level>(digits.size()), code);
}

Word Word::parse(std::string_view text) {
    std::vector<int> digits;
    digits.reserve(text.size());
    for (char c : text) {
        if (c < '1' || c > '8')
            throw std::invalid_argument("invalid word letter '" + std::string(1, c) + "'");
        digits.push_back(c - '0');
    }
    return fromDigits(digits);
}

int Word::digit(Level k) const {
    if (k < 1 || k > level_)
        throw std::out_of_range("word position out of range");
    return static_cast<int>((code_ >> (3 * (level_ - k))) & 7u) + 1;
}

std::vector<int> Word::digits() const {
    std::vector<int> out(static_cast<std::size_t>(level_));
    for (Level k = 1; k <= level_; ++k)
        out[static_cast<std::size_t>(k - 1)] = digit(k);
    return out;
}

Word Word::child(int d) const {
    checkDigit(d);
    return Word(level_ + 1, code_ * 8 + static_cast<std::uint64_t>(d - 1));
}

Word Word::prefix(Level k) const {
    if (k < 0 || k > level_)
        throw std::out_of_range("prefix length out of range");
    return Word(k, code_ >> (3 * (level_ - k)));
}

Word Word::concat(const Word& suffix) const {
    checkLevel(level_ + suffix.level_);
    return Word(level_ + suffix.level_, (code_ << (3 * suffix.level_)) | suffix.code_);
}

bool Word::hasPrefix(const Word& p) const noexcept {
    if (p.level_ > level_)
        return false;
    return (code_ >> (3 * (level_ - p.level_))) == p.code_;
}

Word Word::stripPrefix(const Word& p) const {
    if (!hasPrefix(p))
        throw std::invalid_argument("word " + toString() + " does not start with " + p.toString());
    const Level rest = level_ - p.level_;
    const std::uint64_t mask = rest == 0 ? 0 : ((std::uint64_t{1} << (3 * rest)) - 1);
    return Word(rest, code_ & mask);
}

std::string Word::toString() const {
    std::string s(static_cast<std::size_t>(level_), '0');
    for (Level k = 1; k <= level_; ++k)
        s[static_cast<std::size_t>(k - 1)] = static_cast<char>('0' + digit(k));
    return s;
}

GridOffset digitOffset(int d) {
    checkDigit(d);
    return kDigitOffsets[static_cast<std::size_t>(d - 1)];
}

int offsetDigit(int cx, int cy) {
    for (int d = 1; d <= 8; ++d) {
        const auto& o = kDigitOffsets[static_cast<std::size_t>(d - 1)];
        if (o.cx == cx && o.cy == cy)
            return d;
    }
    return 0;
}

CellBox wordToBox(const Word& w) {
    CellBox box{0, 0, w.level()};
    for (Level k = 1; k <= w.level(); ++k) {
        const GridOffset o = kDigitOffsets[static_cast<std::size_t>(w.digit(k) - 1)];
        box.col = box.col * 3 + o.cx;
        box.row = box.row * 3 + o.cy;
    }
    return box;
}

bool isCarpetBox(const CellBox& box) noexcept {
    if (box.level < 0 || box.level > kMaxWordLevel)
        return false;
    std::int64_t side = 1;
    for (Level k = 0; k < box.level; ++k)
        side *= 3;
    if (box.col < 0 || box.row < 0 || box.col >= side || box.row >= side)
        return false;
    std::int64_t c = box.col, r = box.row;
    for (Level k = 0; k < box.level; ++k) {
        if (c % 3 == 1 && r % 3 == 1)
            return false;
        c /= 3;
        r /= 3;
    }
    return true;
}

Word boxToWord(const CellBox& box) {
    if (!isCarpetBox(box))
        throw std::invalid_argument("box is not a carpet cell");
    std::vector<int> digits(static_cast<std::size_t>(box.level));
    std::int64_t c = box.col, r = box.row;
    for (Level k = box.level; k >= 1; --k) {
        digits[static_cast<std::size_t>(k - 1)] = offsetDigit(static_cast<int>(c % 3), static_cast<int>(r % 3));
        c /= 3;
        r /= 3;
    }
    return Word::fromDigits(digits);
}

std::array<double, 2> cellCenter(const Word& w) {
    const CellBox b = wordToBox(w);
    const double side = static_cast<double>(pow3(w.level()));
    return {-1.0 + (2.0 * static_cast<double>(b.col) + 1.0) / side,
            -1.0 + (2.0 * static_cast<double>(b.row) + 1.0) / side};
}

Adjacency boxesAdjacent(const CellBox& a, const CellBox& b) noexcept {
    const std::int64_t dc = std::llabs(a.col - b.col);
    const std::int64_t dr = std::llabs(a.row - b.row);
    if (dc + dr == 1)
        return Adjacency::Edge;
    if (dc == 1 && dr == 1)
        return Adjacency::Corner;
    return Adjacency::None;
}

Adjacency cellsAdjacent(const Word& v, const Word& w) {
    if (v.level() != w.level())
        throw std::invalid_argument("cellsAdjacent: level mismatch");
    if (v == w)
        throw std::invalid_argument("cellsAdjacent: words must be distinct");
    return boxesAdjacent(wordToBox(v), wordToBox(w));
}

SymmetryElement SymmetryElement::rotation(int k) {
    if (k < 0 || k > 3)
        throw std::invalid_argument("rotation index out of range");
    return {Kind::Rotation, k};
}

SymmetryElement SymmetryElement::reflection(int k) {
    if (k < 0 || k > 3)
        throw std::invalid_argument("reflection index out of range");
    return {Kind::Reflection, k};
}

std::array<SymmetryElement, 8> SymmetryElement::all() {
    std::array<SymmetryElement, 8> out;
    for (int k = 0; k < 4; ++k) {
        out[static_cast<std::size_t>(k)] = rotation(k);
        out[static_cast<std::size_t>(k + 4)] = reflection(k);
    }
    return out;
}

std::array<int, 4> SymmetryElement::matrix() const {
    static constexpr int cosTab[4] = {1, 0, -1, 0};
    static constexpr int sinTab[4] = {0, 1, 0, -1};
    const int c = cosTab[index], s = sinTab[index];
    if (kind == Kind::Rotation)
        return {c, -s, s, c};
    return {c, s, s, -c};
}

int SymmetryElement::ordinal() const noexcept {
    return (kind == Kind::Rotation ? 0 : 4) + index;
}

std::string SymmetryElement::name() const {
    return std::string(kind == Kind::Rotation ? "R" : "S") + std::to_string(index);
}

SymmetryElement compose(const SymmetryElement& a, const SymmetryElement& b) {
    const auto ma = a.matrix(), mb = b.matrix();
    const std::array<int, 4> m{ma[0] * mb[0] + ma[1] * mb[2], ma[0] * mb[1] + ma[1] * mb[3],
                               ma[2] * mb[0] + ma[3] * mb[2], ma[2] * mb[1] + ma[3] * mb[3]};
    for (const auto& e : SymmetryElement::all())
        if (e.matrix() == m)
            return e;
    throw std::logic_error("D4 is not closed under composition");
}

SymmetryElement inverse(const SymmetryElement& a) {
    for (const auto& e : SymmetryElement::all())
        if (compose(a, e) == SymmetryElement::identity())
            return e;
    throw std::logic_error("D4 element without inverse");
}

int applySymmetryToDigit(const SymmetryElement& phi, int d) {
    checkDigit(d);
    return kSymmetryTables[static_cast<std::size_t>(phi.ordinal())][static_cast<std::size_t>(d - 1)];
}

std::uint64_t applySymmetryToCode(const SymmetryElement& phi, Level level, std::uint64_t code) {
    const auto& table = kSymmetryTables[static_cast<std::size_t>(phi.ordinal())];
    std::uint64_t out = 0;
    for (Level k = 0; k < level; ++k) {
        const std::uint64_t letter = (code >> (3 * k)) & 7u;
        out |= static_cast<std::uint64_t>(table[letter] - 1) << (3 * k);
    }
    return out;
}

Word applySymmetry(const SymmetryElement& phi, const Word& w) {
    return Word(w.level(), applySymmetryToCode(phi, w.level(), w.code()));
}

void validateTables() {
    for (int d = 1; d <= 8; ++d) {
        const auto o = kDigitOffsets[static_cast<std::size_t>(d - 1)];
        if (o.cx == 1 && o.cy == 1)
            throw std::logic_error("letter mapped to the removed center");
        if (offsetDigit(o.cx, o.cy) != d)
            throw std::logic_error("letter grid map is not injective");
    }
    const auto elements = SymmetryElement::all();
    for (const auto& e : elements) {
        const auto m = e.matrix();
        for (int d = 1; d <= 8; ++d) {
            const auto o = kDigitOffsets[static_cast<std::size_t>(d - 1)];
            const int u = o.cx - 1, v = o.cy - 1;
            const int image = offsetDigit(m[0] * u + m[1] * v + 1, m[2] * u + m[3] * v + 1);
            if (image != kSymmetryTables[static_cast<std::size_t>(e.ordinal())][static_cast<std::size_t>(d - 1)])
                throw std::logic_error("symmetry table " + e.name() + " disagrees with the geometry at letter " +
                                       std::to_string(d));
        }
    }
    for (const auto& a : elements)
        for (const auto& b : elements) {
            const auto ab = compose(a, b);
            for (int d = 1; d <= 8; ++d) {
                const int lhs = kSymmetryTables[static_cast<std::size_t>(ab.ordinal())][static_cast<std::size_t>(d - 1)];
                const int rhs = kSymmetryTables[static_cast<std::size_t>(a.ordinal())]
                                               [static_cast<std::size_t>(kSymmetryTables[static_cast<std::size_t>(
                                                    b.ordinal())][static_cast<std::size_t>(d - 1)] - 1)];
                if (lhs != rhs)
                    throw std::logic_error("symmetry tables violate the group law");
            }
        }
}

Face parseFace(char c) {
    switch (c) {
    case 'L': case 'l': return Face::Left;
    case 'T': case 't': return Face::Top;
    case 'R': case 'r': return Face::Right;
    case 'B': case 'b': return Face::Bottom;
    default: throw std::invalid_argument(std::string("unknown face '") + c + "'");
    }
}

char faceName(Face f) {
    switch (f) {
    case Face::Left: return 'L';
    case Face::Top: return 'T';
    case Face::Right: return 'R';
    case Face::Bottom: return 'B';
    }
    return '?';
}

std::vector<Word> faceWords(Level n, Face face) {
    if (n < 1)
        throw std::invalid_argument("faceWords: level must be >= 1");
    checkLevel(n);
    std::vector<int> letters;
    for (int d = 1; d <= 8; ++d) {
        const auto o = kDigitOffsets[static_cast<std::size_t>(d - 1)];
        const bool touches = (face == Face::Left && o.cx == 0) || (face == Face::Right && o.cx == 2) ||
                             (face == Face::Bottom && o.cy == 0) || (face == Face::Top && o.cy == 2);
        if (touches)
            letters.push_back(d);
    }
    // Letters come out ascending, so odometer order is ascending in code.
    std::vector<Word> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<int> digits(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < idx.size(); ++k)
            digits[k] = letters[idx[k]];
        out.push_back(Word::fromDigits(digits));
        std::size_t k = idx.size();
        while (k > 0) {
            --k;
            if (++idx[k] < letters.size())
                break;
            idx[k] = 0;
            if (k == 0)
                return out;
        }
    }
}

Rational Rational::reduced() const {
    const std::uint64_t g = std::gcd(num, den);
    if (g == 0)
        return {0, 1};
    return {num / g, den / g};
}

Rational Rational::operator+(const Rational& o) const {
    const std::uint64_t l = std::lcm(den, o.den);
    return Rational{num * (l / den) + o.num * (l / o.den), l}.reduced();
}

bool Rational::operator==(const Rational& o) const {
    const Rational a = reduced(), b = o.reduced();
    return a.num == b.num && a.den == b.den;
}

Rational cellMeasure(const Word& w) {
    return Rational{1, pow8(w.level())};
}

} // namespace carpet
