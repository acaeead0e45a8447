#pragma once

#include <iosfwd>
#include <string>

#include "aslb/funcspace.hpp"

namespace aslb {

/// Text form: '#'-prefixed header lines (meta JSON and grid at full precision)
/// followed by "t,value" rows. Reading uses the header grid, so it is lossless.
void write_csv(std::ostream& os, const SampledFunction& f);
SampledFunction read_csv(std::istream& is);

/// Binary form: magic "ASLB1", u32 meta length, meta JSON, f64 lo/hi/step,
/// u64 count, f64 values. All integers and doubles little-endian.
void write_binary(std::ostream& os, const SampledFunction& f);
SampledFunction read_binary(std::istream& is);

void save_csv(const std::string& path, const SampledFunction& f);
SampledFunction load_csv(const std::string& path);
void save_binary(const std::string& path, const SampledFunction& f);
SampledFunction load_binary(const std::string& path);

/// "%.17g" rendering used by every text artifact.
std::string format_double(double v);

}  // namespace aslb
