#pragma once

#include <iosfwd>
#include <string>

#include "pqsim/cores.hpp"

namespace pqsim {

// Flat key=value config with '#' comments. Unknown keys are errors, not
// warnings: a typo'd knob must not silently run the wrong experiment.
CoreConfig parse_config(std::istream& in, const std::string& source_name);
CoreConfig load_config(const std::string& path);

// The canonical key list, for --help and error messages.
const std::vector<std::string>& config_keys();

}  // namespace pqsim
