// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace facetlens {

using Timestamp = std::chrono::sys_seconds;

/// "2013-05-01T00:00:00Z"
std::string formatTimestamp(Timestamp t);
/// "2013-05-01"
std::string formatDay(Timestamp t);

/// Accepts "YYYY-MM-DD" (midnight UTC) or "YYYY-MM-DDTHH:MM:SSZ".
std::optional<Timestamp> parseTimestamp(std::string_view s);

}  // namespace facetlens
