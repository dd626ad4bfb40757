#pragma once

#include "ph3/kv_format.hpp"
#include "ph3/torus_maps.hpp"

#include <string>

namespace ph3 {

/// Map spec files:
///
///     name = da_ph:0.2
///     [linear]
///     entries = 2 1 0 1 1 0 0 0 1
///     [shear]                # repeated, applied in file order
///     j = 1                  # source coordinate, 1-based
///     k = 2                  # target coordinate
///     epsilon = 0.2
///     cos = 0                # a_0 a_1 ...
///     sin = 0.159154943      # b_1 b_2 ...
///     [conjugator]           # same keys; Phi = last o ... o first
kv::Document map_to_document(const TorusMapSpec& spec);
TorusMapSpec map_from_document(const kv::Document& doc);

std::string write_map_spec(const TorusMapSpec& spec);
TorusMapSpec parse_map_spec(const std::string& text, const std::string& origin = "<string>");
TorusMapSpec read_map_spec(const std::string& path);

/// "builtin:<name>" selects a catalog entry; anything else is a file path.
TorusMapSpec resolve_map(const std::string& reference);

}  // namespace ph3
