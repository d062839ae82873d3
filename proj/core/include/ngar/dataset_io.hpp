#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ngar/ggp.hpp"
#include "ngar/graph.hpp"

namespace ngar {

// A graph sequence together with the generator that produced it, if known.
struct Dataset {
  GraphSequence sequence;
  std::optional<GgpConfig> origin;
};

// Newline-delimited JSON: a header record carrying the generator config and
// seed, then one record {t, N, F, X, A} per graph with row-major X and A.
// Doubles are written with round-trip precision.
void save_sequence(const GraphSequence& sequence, const std::filesystem::path& path,
                   const std::optional<GgpConfig>& origin = std::nullopt);

// Throws ParseError (with the offending line number) on malformed input.
Dataset load_dataset(const std::filesystem::path& path);
GraphSequence load_sequence(const std::filesystem::path& path);

// Same fields as CSV: t, x_0 .. x_{NF-1}, a_0 .. a_{N^2-1}.
void export_csv(const GraphSequence& sequence, const std::filesystem::path& path);

std::string ggp_config_to_json(const GgpConfig& config);
GgpConfig ggp_config_from_json(std::string_view text);

}  // namespace ngar
