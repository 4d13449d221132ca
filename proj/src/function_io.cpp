/*
 * function_io.cpp
 */

#include <carpet/function_io.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace carpet {

namespace {

constexpr char kMagic[4] = {'C', 'E', 'F', '1'};

template <typename T>
void putLittleEndian(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T getLittleEndian(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw std::runtime_error("binary function: unexpected end of data");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

} // namespace

std::string formatReal(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void writeText(std::ostream& out, const GraphFunction& f) {
    out << "level=" << f.level() << " count=" << f.size() << '\n';
    for (double v : f.values())
        out << formatReal(v) << '\n';
}

GraphFunction readText(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("text function: missing header");
    int level = -1;
    unsigned long long count = 0;
    if (std::sscanf(header.c_str(), "level=%d count=%llu", &level, &count) != 2)
        throw std::runtime_error("text function: malformed header '" + header + "'");
    if (level < 0 || level > kMaxWordLevel || count != pow8(level))
        throw std::runtime_error("text function: count does not equal 8^level");
    std::vector<double> values;
    values.reserve(count);
    std::string line;
    while (values.size() < count && std::getline(in, line)) {
        if (line.empty())
            continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str())
            throw std::runtime_error("text function: bad value '" + line + "'");
        values.push_back(v);
    }
    if (values.size() != count)
        throw std::runtime_error("text function: truncated value list");
    GraphFunction f(level, std::move(values));
    if (!f.allFinite())
        throw std::runtime_error("text function: non-finite value");
    return f;
}

void writeBinary(std::ostream& out, const GraphFunction& f) {
    out.write(kMagic, 4);
    putLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(f.level()));
    for (double v : f.values())
        putLittleEndian<double>(out, v);
}

GraphFunction readBinary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("binary function: bad magic");
    const auto level = getLittleEndian<std::uint32_t>(in);
    if (level > static_cast<std::uint32_t>(kMaxWordLevel))
        throw std::runtime_error("binary function: level out of range");
    std::vector<double> values(pow8(static_cast<Level>(level)));
    for (double& v : values)
        v = getLittleEndian<double>(in);
    GraphFunction f(static_cast<Level>(level), std::move(values));
    if (!f.allFinite())
        throw std::runtime_error("binary function: non-finite value");
    return f;
}

GraphFunction readFunction(std::istream& in) {
    const int first = in.peek();
    if (first == 'C')
        return readBinary(in);
    return readText(in);
}

void saveFunction(const std::string& path, const GraphFunction& f, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    if (binary)
        writeBinary(out, f);
    else
        writeText(out, f);
}

GraphFunction loadFunction(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return readFunction(in);
}

} // namespace carpet
