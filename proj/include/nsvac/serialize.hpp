#ifndef NSVAC_SERIALIZE_HPP_
#define NSVAC_SERIALIZE_HPP_

#include <string>

#include "nsvac/field.hpp"

namespace nsvac {

/// Field snapshot format: one ASCII header line
///   nsvac-field dim=<d> n=<n> extent=<L> order=<r> time=<t>
/// followed by the raw little-endian float64 block, component-major.
void write_field(const std::string& path, const Field& f, double time);

struct FieldSnapshot {
    Field field;
    double time = 0;
};

FieldSnapshot read_field(const std::string& path);

} // namespace nsvac

#endif
