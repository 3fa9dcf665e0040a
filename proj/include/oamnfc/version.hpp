// SPDX-License-Identifier: MIT
/// @file version.hpp
/// @brief Library version string embedded in serialized outputs.
#pragma once

namespace oamnfc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace oamnfc
