#pragma once

#include <cstdlib>
#include <string>

// Fixture directory, injected by CMake; overridable for manual runs.
inline std::string fixture_path(const std::string& name) {
    const char* dir = std::getenv("CELETRIP_FIXTURE_DIR");
#ifdef CELETRIP_FIXTURE_DIR_DEFAULT
    if (!dir) dir = CELETRIP_FIXTURE_DIR_DEFAULT;
#endif
    if (!dir) dir = "tests/fixtures";
    return std::string(dir) + "/" + name;
}
