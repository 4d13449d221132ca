/*
 * version.hpp
 */

#ifndef CARPET_VERSION_HPP_
#define CARPET_VERSION_HPP_

namespace carpet {

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace carpet

#endif // CARPET_VERSION_HPP_
