// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "facetlens/ingest.hpp"

namespace facetlens::ingest {

/// {"id","path","format","text","author"?,"last_modified","folders","bytes"}
nlohmann::json toJson(const Document& doc);
/// Throws facetlens::Error on missing or mistyped fields.
Document documentFromJson(const nlohmann::json& j);

}  // namespace facetlens::ingest
