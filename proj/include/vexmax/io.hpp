#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vexmax/czd.hpp"
#include "vexmax/dyadic.hpp"
#include "vexmax/exponent.hpp"
#include "vexmax/maximal.hpp"
#include "vexmax/space.hpp"

namespace vexmax {

using Json = nlohmann::json;

/// Serializable description of a space: either coordinates with the
/// Euclidean metric or a full distance matrix.
struct SpaceSpec {
    Json points = Json::array();  // ids as given (numbers or strings)
    std::size_t dim = 0;          // > 0 when coords are used
    std::vector<double> coords;   // row-major, points x dim
    std::vector<double> dist;     // row-major, points x points
    std::vector<double> mass;

    [[nodiscard]] QuasiMetricSpace build() const;
};

/// Parses `points`, `mass` and either `coords` + `metric: "euclidean"` or
/// `dist`. Throws ValidationError on malformed input.
SpaceSpec space_spec_from_json(const Json& j);
Json space_spec_to_json(const SpaceSpec& s);

/// {"type":"constant","value":v}, {"type":"values","values":[...]} or
/// {"type":"log-holder","p_inf":v,"amplitude":a,"base_point":i[,"d_min":m]}
/// with p(x) = p_inf + a / log(e + 1/max(d(x0,x), d_min)); d_min defaults to
/// the smallest positive distance.
Exponent exponent_from_json(const Json& j, const QuasiMetricSpace& space);

/// {"type":"constant"[,"value":c]}, {"type":"values","values":[...]} or
/// {"type":"power","a":a,"base_point":i[,"d_min":m]} meaning
/// w(x) = max(d(x0,x), d_min)^a.
PointFn weight_from_json(const Json& j, const QuasiMetricSpace& space);

/// A plain array or {"values":[...]}.
PointFn function_from_json(const Json& j, std::size_t n);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

Json ball_to_json(const QuasiMetricSpace& space, std::size_t ball_index);
Json grid_to_json(const DyadicGrid& grid);
Json maximal_to_json(const MaximalResult& r);
std::string maximal_to_csv(const MaximalResult& r);
Json decomposition_to_json(const DyadicGrid& grid, const CZDecomposition& d);
Json stack_to_json(const DyadicGrid& grid, const CZStack& s);

}  // namespace vexmax
