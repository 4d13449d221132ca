/*
 * function_io.hpp
 *
 * Text and binary serialization of GraphFunction / CellFunction.
 *
 * Text:   "level=<n> count=<8^n>" then one value per line in code order,
 *         17 significant digits.
 * Binary: magic "CEF1", little-endian u32 level, then 8^n little-endian f64.
 */

#ifndef CARPET_FUNCTION_IO_HPP_
#define CARPET_FUNCTION_IO_HPP_

#include <carpet/level_graph.hpp>

#include <iosfwd>
#include <string>

namespace carpet {

/// printf("%.17g") of x.
std::string formatReal(double x);

void writeText(std::ostream& out, const GraphFunction& f);
GraphFunction readText(std::istream& in);

void writeBinary(std::ostream& out, const GraphFunction& f);
GraphFunction readBinary(std::istream& in);

/// Reads either format, detected from the first bytes.
GraphFunction readFunction(std::istream& in);

void saveFunction(const std::string& path, const GraphFunction& f, bool binary);
GraphFunction loadFunction(const std::string& path);

} // namespace carpet

#endif // CARPET_FUNCTION_IO_HPP_
