#pragma once

// nlohmann/json conversions shared by the file formats. Private to the library.

#include <json.hpp>

#include "ngar/ggp.hpp"
#include "ngar/graph.hpp"

namespace ngar::detail {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);  // row-major flat list
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols);

Json ggp_config_to_json(const GgpConfig& config);
// Missing phase offsets / dynamics matrix are drawn from the seed.
GgpConfig ggp_config_from_json(const Json& j);

Json graph_to_json(const AttributedGraph& g, long t);
AttributedGraph graph_from_json(const Json& j);

}  // namespace ngar::detail

#include "ngar/neural/config.hpp"

namespace ngar::detail {

Json ngar_config_to_json(const NgarConfig& config);
NgarConfig ngar_config_from_json(const Json& j);

}  // namespace ngar::detail
