#pragma once

#include <string>

#ifndef FLATFLOW_DATA_DIR
#define FLATFLOW_DATA_DIR "data"
#endif

inline std::string testfile(const std::string& name) {
  return std::string(FLATFLOW_DATA_DIR) + "/" + name;
}
