#pragma once

#define OAMCLONE_VERSION "0.1.0"

namespace oamclone {
inline constexpr const char* kVersion = OAMCLONE_VERSION;
}
