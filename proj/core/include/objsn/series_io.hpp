#pragma once

// Reading and writing object series as plain text.
//
// Canonical format: CSV rows (one object per row) preceded by a '#'-prefixed
// header block:
//
//   # objsn-series 1
//   # kind wasserstein_1d
//   # grid 100
//   # payload quantiles
//   0.21,0.33,...
//
// Header keys: kind (required unless hinted), grid (grid kinds) or dim
// (matrix kinds), payload, probs (comma-separated probability grid for
// quantile rows sampled off the midpoint grid).  Payloads:
//
//   values     function/quantile values on the midpoint grid (default)
//   quantiles  synonym for values, distributions only
//   samples    raw draws per row, distributions only; converted to midpoint
//              empirical quantiles (requires an explicit grid)
//   matrix     row-major matrix entries, matrix kinds (default there)
//
// A file whose first non-space character is '{' is instead parsed as a JSON
// container with the same keys plus "objects": [[...], ...].
//
// Matrix rows asymmetric by more than 1e-6 (max absolute entry difference)
// are rejected; smaller asymmetry is averaged away.  All parse errors cite
// the input name and row number.

#include "objsn/series.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace objsn {

// Fallbacks for headerless files; an explicit header wins over hints.
struct SeriesParseHints {
    std::optional<SpaceKind> kind;
    std::optional<int> grid_size;
    std::optional<int> matrix_dim;
    std::optional<std::string> payload;
};

SpaceKind space_kind_from_name(const std::string& name);

ObjectSeries parse_series(const std::filesystem::path& path,
                          const SeriesParseHints& hints = {});
// Same parser on in-memory text; `name` labels error messages.
ObjectSeries parse_series_text(const std::string& text, const std::string& name,
                               const SeriesParseHints& hints = {});

// Canonical '#'-header CSV form; parse_series(write_series(s)) reproduces s
// exactly (values are written with 17 significant digits).
std::string format_series(const ObjectSeries& series);
void write_series(const ObjectSeries& series,
                  const std::filesystem::path& path);

} // namespace objsn
