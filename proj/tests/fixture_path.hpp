#pragma once

#include <string>

#include "localterm/trs_io.hpp"

inline std::string fixture_path(const std::string& name) { return std::string(LOCALTERM_FIXTURES) + "/" + name; }
inline std::string fixture(const std::string& name) { return localterm::read_file(fixture_path(name)); }
