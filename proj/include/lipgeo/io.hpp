#pragma once

#include <string>
#include <vector>

#include "lipgeo/alberti.hpp"
#include "lipgeo/common.hpp"
#include "lipgeo/fragment.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo::io {

/// Point-cloud JSON:
///   {"points":[{"id":..,"coords":[..],"weight":..}],
///    "metric":"euclidean"|"max"|"matrix", "matrix":[[..]]}
FiniteMetricSpace read_space_json(const std::string& path);
void write_space_json(const std::string& path, const FiniteMetricSpace& space);

/// CSV with header id,x1..xd,weight (euclidean metric), or a square numeric
/// distance-matrix CSV (uniform unit weights).
FiniteMetricSpace read_space_csv(const std::string& path, bool matrix = false);

/// Function values CSV: header id,f1..fq; rows joined to the space by id.
std::vector<double> read_values_csv(const std::string& path,
                                    const FiniteMetricSpace& space,
                                    std::size_t* q_out = nullptr);

/// Fragment file: {"domain":[t..], "trace":[pointId..]}; a list of such
/// objects reads a pool.
Fragment read_fragment_json(const std::string& path, const FiniteMetricSpace& space);
std::vector<Fragment> read_fragment_pool_json(const std::string& path,
                                              const FiniteMetricSpace& space);

/// Representation file:
///   {"fragments":[{"domain":..,"trace":..}..], "probs":[..],
///    "densities":[[..]..]}
AlbertiRep read_rep_json(const std::string& path, const FiniteMetricSpace& space);
void write_rep_json(const std::string& path, const FiniteMetricSpace& space,
                    const AlbertiRep& rep);

void write_text(const std::string& path, const std::string& content);

}  // namespace lipgeo::io
