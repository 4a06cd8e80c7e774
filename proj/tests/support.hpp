#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include "ergl/io.hpp"

namespace ergl::testing {

inline DesignParams calibrated_params() {
  const std::string path = std::string(ERGL_SOURCE_DIR) + "/configs/calibrated.cfg";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return params_from_key_values(parse_key_values(in));
}

}  // namespace ergl::testing
