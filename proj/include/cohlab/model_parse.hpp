#pragma once

#include <string_view>

#include "cohlab/variety.hpp"

namespace cohlab {

/// Parses compact model descriptors:
///   lowrank:m=20,n=30,r=2
///   symlowrank:n=15,r=2[,isometric=1]
///   unitgram:n=15,r=3
///   cayley:n=40,d=3
///   linear:@path/to/file.flat
///   block:n=16,k=4        (block flat, requires k | n)
///   maxinc:n=20,k=3       (maximally incoherent flat)
/// Throws ParseError on unknown kinds, missing or unknown keys, bad values.
VarietyModel parse_model(std::string_view descriptor);

}  // namespace cohlab
