#pragma once

#include "gaussbv/field.hpp"

#include <iosfwd>
#include <string>

namespace gaussbv {

/// Writes `x1,...,xd,value` with one row per node, full round-trip precision.
void write_field_csv(std::ostream& out, const GridField& u);
void write_field_csv(const std::string& path, const GridField& u);

/// Reads a field written by write_field_csv. The node set must be a full
/// tensor grid, equispaced and symmetric about the origin, with the same
/// node count on every axis; anything else raises GridError.
GridField read_field_csv(std::istream& in, const GaussianMeasure& measure);
GridField read_field_csv(const std::string& path, const GaussianMeasure& measure);

}  // namespace gaussbv
