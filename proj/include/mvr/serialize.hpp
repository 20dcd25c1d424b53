#pragma once

#include "mvr/structured.hpp"

#include <iosfwd>
#include <string>

namespace mvr {

// Binary container: magic, kind tag, seed, then named entries holding either
// an int64 or a column-major array of IEEE doubles. Round trips are bit-exact.
struct LoadedForm {
  StructuredForm form;
  std::uint64_t seed = 0;
};

void save_form(std::ostream& out, const StructuredForm& form, std::uint64_t seed);
LoadedForm load_form(std::istream& in);

void save_form_file(const std::string& path, const StructuredForm& form, std::uint64_t seed);
LoadedForm load_form_file(const std::string& path);

}  // namespace mvr
